//! Fixtures shared by the solver benchmarks.

use bap::generate::{generate, GeneratorSpec, Kind};
use bap::{BapRng, Instance, Matrix};

/// A seeded instance of the given kind in canonical orientation.
pub fn instance(kind: Kind, m: usize, n: usize, seed: u64) -> Instance {
    generate(&GeneratorSpec::new(kind, m, n, seed))
        .and_then(|f| f.to_instance())
        .expect("benchmark fixture")
}

/// A `dim x dim` matrix of integers in `[0, 999]`.
pub fn cost_matrix(dim: usize, seed: u64) -> Matrix {
    let mut rng = BapRng::new(seed);
    Matrix::from_fn(dim, |_, _| rng.int_in(0, 999) as f64)
}
