//! Bilinear assignment problem: model, exact and heuristic solvers,
//! polynomial special cases, reductions and solution-set analysis.

pub mod analysis;
pub mod auto;
pub mod error;
pub mod exact;
pub mod generate;
pub mod heuristics;
pub mod io;
pub mod lap;
pub mod model;
pub mod reductions;
pub mod rng;
pub mod structure;

pub use error::{BapError, Result};
pub use io::{InstanceFile, Metadata};
pub use lap::{solve_lap, LapResult, Sense};
pub use model::{evaluate, Assignment, EnumCap, FractionalSolution, Instance, Matrix, ObjectiveValue, QuadCost};
pub use rng::BapRng;
pub use structure::FactoredQ;
