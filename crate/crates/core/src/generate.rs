//! Seeded instance generators.
//!
//! Every kind draws integers uniformly from `[lo, hi]` (default `[0, 99]`) with
//! [`BapRng`], in the order documented on each kind. The same spec always
//! produces byte-identical files.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{BapError, Result};
use crate::io::{FactorPair, InstanceFile, Metadata};
use crate::model::{Instance, Matrix, QuadCost};
use crate::reductions::{default_penalty, disjoint_matchings_to_bap, qap_penalty_reduction, tap_to_bap};
use crate::rng::BapRng;
use crate::structure::{materialize_q, FactoredQ};

/// Tag written to `metadata.generator`; bump when any draw order changes.
pub const GENERATOR_TAG: &str = "bap-gen/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// `Q`, `C`, `D` entrywise uniform, drawn in that order.
    Uniform,
    /// `q_ijij` drawn for each `(i, j)`, all other `Q` entries zero; then `C`, `D`. Requires `m = n`.
    Diagonal,
    /// `Q = e_ijk + f_ijl + g_ikl + h_jkl` from random `E`, `F`, `G`, `H`; then `C`, `D`.
    Linearizable,
    /// `q_ijkl = u_ij + r^{ij}_k + s^{ij}_l`: `u` first, then `r`, `s` per `(i, j)`; then `C`, `D`.
    Cvp,
    /// `q_ijkl = sum_p a^p_ij b^p_kl`: `A^p`, `B^p` per factor; then `C`, `D` (a sum matrix on the chosen side).
    Rank,
    /// Random QAP `Q'` on `n` with the default penalty.
    Qap,
    /// Random 3AP cube on `n`.
    Tap,
    /// Random edge sets `E1`, `E2` on `K_{n,n}`, each edge kept with probability `density`.
    DisjointMatchings,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::Uniform,
        Kind::Diagonal,
        Kind::Linearizable,
        Kind::Cvp,
        Kind::Rank,
        Kind::Qap,
        Kind::Tap,
        Kind::DisjointMatchings,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Uniform => "uniform",
            Kind::Diagonal => "diagonal",
            Kind::Linearizable => "linearizable",
            Kind::Cvp => "cvp",
            Kind::Rank => "rank",
            Kind::Qap => "qap",
            Kind::Tap => "tap",
            Kind::DisjointMatchings => "disjoint-matchings",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = BapError;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| BapError::InvalidArgument(format!("unknown generator kind {s:?}")))
    }
}

/// Which linear cost matrix a `rank` instance makes a sum matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumSide {
    None,
    C,
    D,
}

impl FromStr for SumSide {
    type Err = BapError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(SumSide::None),
            "c" | "C" => Ok(SumSide::C),
            "d" | "D" => Ok(SumSide::D),
            _ => Err(BapError::InvalidArgument(format!("unknown sum side {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: Kind,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub lo: i64,
    pub hi: i64,
    /// Number of factor pairs for `rank`.
    pub rank: usize,
    pub sum_side: SumSide,
    /// Gap parameter for `disjoint-matchings`.
    pub alpha: f64,
    /// Edge probability for `disjoint-matchings`.
    pub density: f64,
    /// Emit the 0-1 variant of `disjoint-matchings`.
    pub zero_one: bool,
}

impl GeneratorSpec {
    pub fn new(kind: Kind, m: usize, n: usize, seed: u64) -> Self {
        GeneratorSpec {
            kind,
            m,
            n,
            seed,
            lo: 0,
            hi: 99,
            rank: 1,
            sum_side: SumSide::D,
            alpha: 2.0,
            density: 0.5,
            zero_one: false,
        }
    }
}

fn draw_vec(rng: &mut BapRng, len: usize, lo: i64, hi: i64) -> Vec<f64> {
    (0..len).map(|_| rng.int_in(lo, hi) as f64).collect()
}

fn draw_matrix(rng: &mut BapRng, dim: usize, lo: i64, hi: i64) -> Matrix {
    Matrix::new(dim, draw_vec(rng, dim * dim, lo, hi)).expect("square")
}

fn draw_sum_matrix(rng: &mut BapRng, dim: usize, lo: i64, hi: i64) -> Matrix {
    let s = draw_vec(rng, dim, lo, hi);
    let t = draw_vec(rng, dim, lo, hi);
    Matrix::from_fn(dim, |i, j| s[i] + t[j])
}

fn metadata(spec: &GeneratorSpec, params: serde_json::Value) -> Metadata {
    Metadata {
        generator: Some(GENERATOR_TAG.into()),
        seed: Some(spec.seed),
        kind: Some(spec.kind.name().into()),
        params: Some(params),
        ..Metadata::default()
    }
}

fn require_square(spec: &GeneratorSpec) -> Result<usize> {
    if spec.m != spec.n {
        return Err(BapError::InvalidArgument(format!(
            "{} instances need m = n (got m = {}, n = {})",
            spec.kind, spec.m, spec.n
        )));
    }
    Ok(spec.n)
}

/// Builds the instance described by `spec`, together with metadata recording how.
pub fn generate(spec: &GeneratorSpec) -> Result<InstanceFile> {
    let (m, n, lo, hi) = (spec.m, spec.n, spec.lo, spec.hi);
    if m == 0 || n == 0 {
        return Err(BapError::EmptySize { m, n });
    }
    if lo > hi {
        return Err(BapError::InvalidArgument(format!("empty cost range [{lo}, {hi}]")));
    }
    let mut rng = BapRng::new(spec.seed);
    let range = json!({ "lo": lo, "hi": hi });

    let (instance, md): (Instance, Metadata) = match spec.kind {
        Kind::Uniform => {
            let q = QuadCost::new(m, n, draw_vec(&mut rng, m * m * n * n, lo, hi))?;
            let c = draw_matrix(&mut rng, m, lo, hi);
            let d = draw_matrix(&mut rng, n, lo, hi);
            (Instance::new(q, c, d)?, metadata(spec, range))
        }
        Kind::Diagonal => {
            let n = require_square(spec)?;
            let diag = draw_vec(&mut rng, n * n, lo, hi);
            let q = QuadCost::from_fn(n, n, |i, j, k, l| if i == k && j == l { diag[i * n + j] } else { 0.0 });
            let c = draw_matrix(&mut rng, n, lo, hi);
            let d = draw_matrix(&mut rng, n, lo, hi);
            (Instance::new(q, c, d)?, metadata(spec, range))
        }
        Kind::Linearizable => {
            let e = draw_vec(&mut rng, m * m * n, lo, hi);
            let f = draw_vec(&mut rng, m * m * n, lo, hi);
            let g = draw_vec(&mut rng, m * n * n, lo, hi);
            let h = draw_vec(&mut rng, m * n * n, lo, hi);
            let q = QuadCost::from_fn(m, n, |i, j, k, l| {
                e[(i * m + j) * n + k] + f[(i * m + j) * n + l] + g[(i * n + k) * n + l] + h[(j * n + k) * n + l]
            });
            let c = draw_matrix(&mut rng, m, lo, hi);
            let d = draw_matrix(&mut rng, n, lo, hi);
            (Instance::new(q, c, d)?, metadata(spec, range))
        }
        Kind::Cvp => {
            let u = draw_vec(&mut rng, m * m, lo, hi);
            let mut rows = Vec::with_capacity(m * m);
            for _ in 0..m * m {
                let r = draw_vec(&mut rng, n, lo, hi);
                let s = draw_vec(&mut rng, n, lo, hi);
                rows.push((r, s));
            }
            let q = QuadCost::from_fn(m, n, |i, j, k, l| {
                let (r, s) = &rows[i * m + j];
                u[i * m + j] + r[k] + s[l]
            });
            let c = draw_matrix(&mut rng, m, lo, hi);
            let d = draw_matrix(&mut rng, n, lo, hi);
            (Instance::new(q, c, d)?, metadata(spec, range))
        }
        Kind::Rank => {
            if spec.rank == 0 {
                return Err(BapError::InvalidArgument("rank must be at least 1".into()));
            }
            let mut pairs = Vec::with_capacity(spec.rank);
            for _ in 0..spec.rank {
                let a = draw_matrix(&mut rng, m, lo, hi);
                let b = draw_matrix(&mut rng, n, lo, hi);
                pairs.push((a, b));
            }
            let factored = FactoredQ::new(pairs)?;
            let q = materialize_q(&factored, m, n)?;
            let c = match spec.sum_side {
                SumSide::C => draw_sum_matrix(&mut rng, m, lo, hi),
                _ => draw_matrix(&mut rng, m, lo, hi),
            };
            let d = match spec.sum_side {
                SumSide::D => draw_sum_matrix(&mut rng, n, lo, hi),
                _ => draw_matrix(&mut rng, n, lo, hi),
            };
            let instance = Instance::new(q, c, d)?;
            // factors follow the written (canonical) orientation
            let oriented = if instance.swapped() { factored.swap_sides() } else { factored };
            let mut md = metadata(
                spec,
                json!({ "lo": lo, "hi": hi, "rank": spec.rank, "sum_side": spec.sum_side }),
            );
            md.factors = Some(
                oriented
                    .factors()
                    .iter()
                    .map(|(a, b)| FactorPair {
                        a: a.as_slice().to_vec(),
                        b: b.as_slice().to_vec(),
                    })
                    .collect(),
            );
            (instance, md)
        }
        Kind::Qap => {
            let n = require_square(spec)?;
            let qp = QuadCost::new(n, n, draw_vec(&mut rng, n.pow(4), lo, hi))?;
            let penalty = default_penalty(&qp);
            (
                qap_penalty_reduction(&qp, penalty)?,
                metadata(spec, json!({ "lo": lo, "hi": hi, "penalty": penalty })),
            )
        }
        Kind::Tap => {
            let n = require_square(spec)?;
            let cube = draw_vec(&mut rng, n.pow(3), lo, hi);
            (tap_to_bap(n, &cube)?, metadata(spec, range))
        }
        Kind::DisjointMatchings => {
            let n = require_square(spec)?;
            let draw_edges = |rng: &mut BapRng| {
                let mut edges = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if rng.bernoulli(spec.density) {
                            edges.push((i, j));
                        }
                    }
                }
                edges
            };
            let e1 = draw_edges(&mut rng);
            let e2 = draw_edges(&mut rng);
            let inst = disjoint_matchings_to_bap(n, &e1, &e2, spec.alpha, spec.zero_one)?;
            let params = json!({
                "alpha": spec.alpha,
                "density": spec.density,
                "zero_one": spec.zero_one,
                "E1": e1,
                "E2": e2,
            });
            (inst, metadata(spec, params))
        }
    };
    Ok(InstanceFile::from_instance(&instance, Some(md)))
}
