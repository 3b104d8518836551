//! Polynomially solvable special cases.
//!
//! - Linearizable `Q`: `q_ijkl = e_ijk + f_ijl + g_ikl + h_jkl`. Detected by
//!   solving that linear system in least squares; the instance then splits into
//!   two assignment problems over `A + C` and `B + D`.
//! - Constant value rows: every block `P^{ij}` is a sum matrix, so the `y`
//!   contribution of each `x_ij` is a constant `alpha_ij`.
//! - Rank one `Q = A (x) B` with `C` or `D` a sum matrix: only the minimizing and
//!   maximizing assignments of the factor on the constant side need checking.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{BapError, Result};
use crate::lap::{solve_lap, Sense};
use crate::model::{evaluate, Assignment, Instance, Matrix, ObjectiveValue, QuadCost};

fn lap_min(cost: &Matrix) -> Vec<usize> {
    solve_lap(cost, Sense::Minimize).expect("finite square costs").perm
}

/// Default relative tolerance: residuals are compared against `rel * (1 + max|q|)`.
pub const LINEARIZABLE_REL_TOL: f64 = 1e-7;

/// Matrices `A` (`m x m`) and `B` (`n x n`) with `f̄(x, y) = A(x) + B(y)` for every solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub a: Matrix,
    pub b: Matrix,
}

/// Four arrays whose sum reproduces `Q`.
///
/// Layouts: `e[(i*m + j)*n + k]`, `f[(i*m + j)*n + l]`, `g[(i*n + k)*n + l]`, `h[(j*n + k)*n + l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumDecomposition {
    m: usize,
    n: usize,
    pub e: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
}

impl SumDecomposition {
    pub fn new(m: usize, n: usize, e: Vec<f64>, f: Vec<f64>, g: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        for (what, v, len) in [
            ("E", &e, m * m * n),
            ("F", &f, m * m * n),
            ("G", &g, m * n * n),
            ("H", &h, m * n * n),
        ] {
            if v.len() != len {
                return Err(BapError::Dimension {
                    what,
                    expected: len,
                    actual: v.len(),
                });
            }
        }
        Ok(SumDecomposition { m, n, e, f, g, h })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        SumDecomposition {
            m,
            n,
            e: vec![0.0; m * m * n],
            f: vec![0.0; m * m * n],
            g: vec![0.0; m * n * n],
            h: vec![0.0; m * n * n],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let (m, n) = (self.m, self.n);
        self.e[(i * m + j) * n + k] + self.f[(i * m + j) * n + l] + self.g[(i * n + k) * n + l] + self.h[(j * n + k) * n + l]
    }

    pub fn recompose(&self) -> QuadCost {
        QuadCost::from_fn(self.m, self.n, |i, j, k, l| self.entry(i, j, k, l))
    }

    /// Largest `|q_ijkl - (e + f + g + h)|`.
    pub fn max_residual(&self, q: &QuadCost) -> f64 {
        q.as_slice()
            .iter()
            .zip(self.recompose().as_slice())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

// Unknown ordering in the least-squares system: E, then F, then G, then H.
fn system_matrix(m: usize, n: usize) -> DMatrix<f64> {
    let (ne, ng) = (m * m * n, m * n * n);
    let rows = m * m * n * n;
    let mut a = DMatrix::zeros(rows, 2 * ne + 2 * ng);
    let mut r = 0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..n {
                for l in 0..n {
                    a[(r, (i * m + j) * n + k)] = 1.0;
                    a[(r, ne + (i * m + j) * n + l)] = 1.0;
                    a[(r, 2 * ne + (i * n + k) * n + l)] = 1.0;
                    a[(r, 2 * ne + ng + (j * n + k) * n + l)] = 1.0;
                    r += 1;
                }
            }
        }
    }
    a
}

/// Searches for a sum decomposition of `Q` by least squares.
///
/// Returns the decomposition when its largest residual is within `tol`
/// (default `1e-7 * (1 + max|q|)`); `None` means `Q` is not linearizable.
pub fn check_linearizable(q: &QuadCost, tol: Option<f64>) -> Option<SumDecomposition> {
    let (m, n) = (q.m(), q.n());
    let tol = tol.unwrap_or(LINEARIZABLE_REL_TOL * (1.0 + q.max_abs()));
    let mut a = system_matrix(m, n);

    // Every E/F column has n ones and every G/H column has m ones.
    let (ne, ng) = (m * m * n, m * n * n);
    let scale: Vec<f64> = (0..2 * ne + 2 * ng)
        .map(|c| if c < 2 * ne { 1.0 / (n as f64).sqrt() } else { 1.0 / (m as f64).sqrt() })
        .collect();
    for (c, s) in scale.iter().enumerate() {
        a.column_mut(c).scale_mut(*s);
    }
    let b = DVector::from_column_slice(q.as_slice());
    let svd = a.svd(true, true);
    let sigma_max = svd.singular_values.max();
    let sol = svd.solve(&b, 1e-10 * sigma_max.max(1.0)).ok()?;
    let unknowns: Vec<f64> = sol.iter().zip(&scale).map(|(v, s)| v * s).collect();

    let dec = SumDecomposition {
        m,
        n,
        e: unknowns[..ne].to_vec(),
        f: unknowns[ne..2 * ne].to_vec(),
        g: unknowns[2 * ne..2 * ne + ng].to_vec(),
        h: unknowns[2 * ne + ng..].to_vec(),
    };
    (dec.max_residual(q) <= tol).then_some(dec)
}

/// `a_ij = sum_k (e_ijk + f_ijk)`, `b_kl = sum_i (g_ikl + h_ikl)`.
pub fn extract_linearization(dec: &SumDecomposition) -> Linearization {
    let (m, n) = (dec.m, dec.n);
    let a = Matrix::from_fn(m, |i, j| {
        (0..n)
            .map(|k| dec.e[(i * m + j) * n + k] + dec.f[(i * m + j) * n + k])
            .sum()
    });
    let b = Matrix::from_fn(n, |k, l| {
        (0..m)
            .map(|i| dec.g[(i * n + k) * n + l] + dec.h[(i * n + k) * n + l])
            .sum()
    });
    Linearization { a, b }
}

/// Solves a linearizable instance as two independent assignment problems over `A + C` and `B + D`.
///
/// The caller vouches that `lin` linearizes the instance's `Q`.
pub fn solve_linearizable(instance: &Instance, lin: &Linearization) -> Result<(Assignment, ObjectiveValue)> {
    if lin.a.dim() != instance.m() || lin.b.dim() != instance.n() {
        return Err(BapError::Dimension {
            what: "linearization",
            expected: instance.m(),
            actual: lin.a.dim(),
        });
    }
    let x = lap_min(&lin.a.add(instance.c()));
    let y = lap_min(&lin.b.add(instance.d()));
    let sol = Assignment::new_unchecked(x, y);
    let val = evaluate(instance, &sol)?;
    Ok((sol, val))
}

/// Tests `t_ij = s_i + t_j`. On success returns `(s, t)` normalized so that `t_0 = 0`.
pub fn is_sum_matrix(t: &Matrix, tol: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let k = t.dim();
    if k == 0 {
        return Some((vec![], vec![]));
    }
    let s: Vec<f64> = (0..k).map(|i| t[(i, 0)]).collect();
    let cols: Vec<f64> = (0..k).map(|j| t[(0, j)] - t[(0, 0)]).collect();
    for i in 0..k {
        for j in 0..k {
            if (t[(i, j)] - (s[i] + cols[j])).abs() > tol {
                return None;
            }
        }
    }
    Some((s, cols))
}

fn default_tol(scale: f64) -> f64 {
    1e-9 * (1.0 + scale)
}

/// When every block `P^{ij}` is a sum matrix, returns `W = alpha + C` where
/// `alpha_ij` is the constant assignment value of `P^{ij}`.
pub fn cvp_decompose(instance: &Instance) -> Option<Matrix> {
    let (m, n) = (instance.m(), instance.n());
    let q = instance.q();
    let tol = default_tol(q.max_abs());
    let mut alpha = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let block = Matrix::new(n, q.block(i, j).to_vec()).expect("block is n x n");
            is_sum_matrix(&block, tol)?;
            alpha.push((0..n).map(|k| block[(k, k)]).sum());
        }
    }
    let w = Matrix::new(m, alpha).expect("m x m").add(instance.c());
    Some(w)
}

/// Solves a constant-value-row instance: `x` minimizes `W`, `y` minimizes `D`.
pub fn solve_cvp(instance: &Instance, w: &Matrix) -> Result<(Assignment, ObjectiveValue)> {
    if w.dim() != instance.m() {
        return Err(BapError::Dimension {
            what: "W",
            expected: instance.m(),
            actual: w.dim(),
        });
    }
    let sol = Assignment::new_unchecked(lap_min(w), lap_min(instance.d()));
    let val = evaluate(instance, &sol)?;
    Ok((sol, val))
}

/// `Q` in factored form: `q_ijkl = sum_p a^p_ij * b^p_kl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactoredQ {
    factors: Vec<(Matrix, Matrix)>,
}

impl FactoredQ {
    pub fn new(factors: Vec<(Matrix, Matrix)>) -> Result<Self> {
        let Some((a0, b0)) = factors.first() else {
            return Err(BapError::InvalidArgument("factored form needs at least one factor".into()));
        };
        let (m, n) = (a0.dim(), b0.dim());
        for (a, b) in &factors {
            if a.dim() != m {
                return Err(BapError::Dimension {
                    what: "factor A",
                    expected: m,
                    actual: a.dim(),
                });
            }
            if b.dim() != n {
                return Err(BapError::Dimension {
                    what: "factor B",
                    expected: n,
                    actual: b.dim(),
                });
            }
        }
        Ok(FactoredQ { factors })
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn m(&self) -> usize {
        self.factors[0].0.dim()
    }

    pub fn n(&self) -> usize {
        self.factors[0].1.dim()
    }

    pub fn factors(&self) -> &[(Matrix, Matrix)] {
        &self.factors
    }

    /// Exchanges the roles of the two sides, matching [`QuadCost::swap_sides`].
    pub fn swap_sides(&self) -> FactoredQ {
        FactoredQ {
            factors: self.factors.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
        }
    }
}

/// Dense `Q` from its factors.
pub fn materialize_q(factored: &FactoredQ, m: usize, n: usize) -> Result<QuadCost> {
    if factored.m() != m || factored.n() != n {
        return Err(BapError::Dimension {
            what: if factored.m() != m { "factor A" } else { "factor B" },
            expected: if factored.m() != m { m } else { n },
            actual: if factored.m() != m { factored.m() } else { factored.n() },
        });
    }
    Ok(QuadCost::from_fn(m, n, |i, j, k, l| {
        factored
            .factors
            .iter()
            .map(|(a, b)| a[(i, j)] * b[(k, l)])
            .sum()
    }))
}

/// Exact solver for rank-one `Q = A (x) B` when `C` or `D` is a sum matrix, in `O(m^3 + n^3)`.
///
/// With `D` a sum matrix, the optimal `y` either minimizes or maximizes `B(y)`
/// depending on the sign of `A(x)`; both candidates are tried and `x` is
/// re-optimized for each over `Bbar * A + C`. With `C` a sum matrix the roles flip.
pub fn rank_one_solve(instance: &Instance, factored: &FactoredQ) -> Result<(Assignment, ObjectiveValue)> {
    if factored.rank() != 1 {
        return Err(BapError::Precondition(format!(
            "rank: expected a single factor pair, got {}",
            factored.rank()
        )));
    }
    let (m, n) = (instance.m(), instance.n());
    let dense = materialize_q(factored, m, n)
        .map_err(|e| BapError::Precondition(format!("consistency: {e}")))?;
    let tol = default_tol(instance.max_abs().max(dense.max_abs()));
    let mismatch = dense
        .as_slice()
        .iter()
        .zip(instance.q().as_slice())
        .fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs()));
    if mismatch > tol {
        return Err(BapError::Precondition(format!(
            "consistency: factored form differs from Q by {mismatch}"
        )));
    }

    let (a, b) = &factored.factors[0];
    let candidates: Vec<Assignment> = if is_sum_matrix(instance.d(), tol).is_some() {
        [Sense::Minimize, Sense::Maximize]
            .into_iter()
            .map(|sense| {
                let y = solve_lap(b, sense).expect("finite factor").perm;
                let bbar = b.assignment_value(&y);
                let x = lap_min(&a.map(|v| v * bbar).add(instance.c()));
                Assignment::new_unchecked(x, y)
            })
            .collect()
    } else if is_sum_matrix(instance.c(), tol).is_some() {
        [Sense::Minimize, Sense::Maximize]
            .into_iter()
            .map(|sense| {
                let x = solve_lap(a, sense).expect("finite factor").perm;
                let abar = a.assignment_value(&x);
                let y = lap_min(&b.map(|v| v * abar).add(instance.d()));
                Assignment::new_unchecked(x, y)
            })
            .collect()
    } else {
        return Err(BapError::Precondition(
            "sum-matrix: neither C nor D is a sum matrix".into(),
        ));
    };

    let mut best: Option<(Assignment, ObjectiveValue)> = None;
    for sol in candidates {
        let val = evaluate(instance, &sol)?;
        if best.as_ref().is_none_or(|(_, b)| val.total < b.total) {
            best = Some((sol, val));
        }
    }
    Ok(best.expect("two candidates"))
}

/// Numerical rank of `Q` viewed as an `m^2 x n^2` matrix: singular values above `1e-8 * sigma_max`.
pub fn numeric_rank(q: &QuadCost) -> usize {
    let (m, n) = (q.m(), q.n());
    let mat = DMatrix::from_row_slice(m * m, n * n, q.as_slice());
    let sv = mat.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-8 * max).count()
}
