//! Instance representation, feasibility and objective evaluation.
//!
//! A BAP instance is the triple `(Q, C, D)` with size parameters `m <= n`.
//! Solutions are pairs of permutations: `x[i] = j` means `x_ij = 1`, and
//! likewise for `y`. All indices are zero-based.

use std::ops::Index;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{BapError, Result};

/// Tolerance used for doubly stochastic row and column sums.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Default limit on the number of solutions any enumeration may visit.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_ENUM_CAP`].
pub const ENUM_CAP_ENV: &str = "BAP_ENUM_CAP";

/// Upper bound on how many candidates an exhaustive routine may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumCap(pub u64);

impl Default for EnumCap {
    fn default() -> Self {
        EnumCap(DEFAULT_ENUM_CAP)
    }
}

impl EnumCap {
    /// Reads `BAP_ENUM_CAP`, falling back to the default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var(ENUM_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(EnumCap)
            .unwrap_or_default()
    }

    /// Refuses when `count` exceeds the cap.
    pub fn check(self, count: u128) -> Result<()> {
        if count > self.0 as u128 {
            Err(BapError::CapExceeded { count, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

/// `k!`, saturating at `u128::MAX`.
pub fn factorial(k: usize) -> u128 {
    (1..=k as u128).fold(1u128, |acc, v| acc.saturating_mul(v))
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    (0..k).permutations(k).collect()
}

/// Dense square matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(BapError::Dimension {
                what: "matrix entries",
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Matrix { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        Matrix {
            dim,
            data: vec![value; dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Matrix { dim, data }
    }

    /// Builds a matrix from rows; every row must have as many entries as there are rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(BapError::Dimension {
                    what: "matrix row length",
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Matrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Entrywise sum. Panics if the dimensions differ.
    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Value of the linear assignment objective `sum_i self[i][perm[i]]`.
    pub fn assignment_value(&self, perm: &[usize]) -> f64 {
        perm.iter()
            .enumerate()
            .map(|(i, &j)| self.data[i * self.dim + j])
            .sum()
    }

    pub(crate) fn check_finite(&self, what: &'static str) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(BapError::NonFinite { what, index }),
            None => Ok(()),
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.dim + j]
    }
}

/// The `m x m x n x n` quadratic cost array, stored in `(i, j, k, l)` row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadCost {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl QuadCost {
    pub fn new(m: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        let expected = m * m * n * n;
        if data.len() != expected {
            return Err(BapError::Dimension {
                what: "Q entries",
                expected,
                actual: data.len(),
            });
        }
        Ok(QuadCost { m, n, data })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        QuadCost {
            m,
            n,
            data: vec![0.0; m * m * n * n],
        }
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(m * m * n * n);
        for i in 0..m {
            for j in 0..m {
                for k in 0..n {
                    for l in 0..n {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        QuadCost { m, n, data }
    }

    /// The identity when viewed as an `n^2 x n^2` matrix: `q_ijkl = 1` iff `i = k` and `j = l`.
    pub fn identity(n: usize) -> Self {
        QuadCost::from_fn(n, n, |i, j, k, l| if i == k && j == l { 1.0 } else { 0.0 })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn offset(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.m + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.offset(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let o = self.offset(i, j, k, l);
        self.data[o] = value;
    }

    /// The `n x n` block `P^{ij}` with entries `q_ijkl`.
    pub fn block(&self, i: usize, j: usize) -> &[f64] {
        let start = self.offset(i, j, 0, 0);
        &self.data[start..start + self.n * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Exchanges the roles of the two sides: the result has `q'_klij = q_ijkl`.
    pub fn swap_sides(&self) -> QuadCost {
        QuadCost::from_fn(self.n, self.m, |k, l, i, j| self.get(i, j, k, l))
    }
}

/// A BAP instance `(Q, C, D)` with `1 <= m <= n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    q: QuadCost,
    c: Matrix,
    d: Matrix,
    swapped: bool,
}

impl Instance {
    /// Validates the arrays and orients the instance so that `m <= n`.
    ///
    /// When the caller supplies `m > n` the two sides are exchanged and
    /// [`Instance::swapped`] reports it; use [`Instance::to_caller`] to map
    /// solutions back to the caller's orientation.
    pub fn new(q: QuadCost, c: Matrix, d: Matrix) -> Result<Self> {
        let (m, n) = (q.m(), q.n());
        if m == 0 || n == 0 {
            return Err(BapError::EmptySize { m, n });
        }
        if c.dim() != m {
            return Err(BapError::Dimension {
                what: "C rows",
                expected: m,
                actual: c.dim(),
            });
        }
        if d.dim() != n {
            return Err(BapError::Dimension {
                what: "D rows",
                expected: n,
                actual: d.dim(),
            });
        }
        if let Some(index) = q.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(BapError::NonFinite { what: "Q", index });
        }
        c.check_finite("C")?;
        d.check_finite("D")?;
        if m > n {
            Ok(Instance {
                q: q.swap_sides(),
                c: d,
                d: c,
                swapped: true,
            })
        } else {
            Ok(Instance {
                q,
                c,
                d,
                swapped: false,
            })
        }
    }

    pub fn m(&self) -> usize {
        self.q.m()
    }

    pub fn n(&self) -> usize {
        self.q.n()
    }

    pub fn q(&self) -> &QuadCost {
        &self.q
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    /// True when the constructor exchanged the sides to restore `m <= n`.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// Maps a solution of this (canonical) instance to the orientation the caller supplied.
    pub fn to_caller(&self, sol: &Assignment) -> Assignment {
        if self.swapped {
            sol.swap_sides()
        } else {
            sol.clone()
        }
    }

    /// Maps a solution given in the caller's orientation onto this instance.
    pub fn from_caller(&self, sol: &Assignment) -> Assignment {
        self.to_caller(sol)
    }

    /// Largest absolute entry over `Q`, `C` and `D`.
    pub fn max_abs(&self) -> f64 {
        self.q.max_abs().max(self.c.max_abs()).max(self.d.max_abs())
    }

    /// `sum |q| + sum |c| + sum |d|`.
    pub fn abs_sum(&self) -> f64 {
        let s = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();
        s(self.q.as_slice()) + s(self.c.as_slice()) + s(self.d.as_slice())
    }

    /// The `n x n` matrix `g_kl = d_kl + sum_i q_{i, x[i], k, l}`: the cost of `y` once `x` is fixed.
    pub fn y_costs_given_x(&self, x: &[usize]) -> Matrix {
        let n = self.n();
        let mut g = self.d.clone();
        for (i, &j) in x.iter().enumerate() {
            for (acc, q) in g.data.iter_mut().zip(self.q.block(i, j)) {
                *acc += q;
            }
        }
        debug_assert_eq!(g.dim(), n);
        g
    }

    /// The `m x m` matrix `h_ij = c_ij + sum_k q_{i, j, k, y[k]}`: the cost of `x` once `y` is fixed.
    pub fn x_costs_given_y(&self, y: &[usize]) -> Matrix {
        let m = self.m();
        Matrix::from_fn(m, |i, j| {
            let block = self.q.block(i, j);
            let n = self.n();
            self.c[(i, j)] + y.iter().enumerate().map(|(k, &l)| block[k * n + l]).sum::<f64>()
        })
    }
}

/// A feasible BAP solution encoded as two permutations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    x: Vec<usize>,
    y: Vec<usize>,
}

fn check_perm(what: &'static str, p: &[usize]) -> Result<()> {
    let mut seen = vec![false; p.len()];
    for &v in p {
        if v >= p.len() || seen[v] {
            return Err(BapError::NotPermutation { what, len: p.len() });
        }
        seen[v] = true;
    }
    Ok(())
}

impl Assignment {
    pub fn new(x: Vec<usize>, y: Vec<usize>) -> Result<Self> {
        check_perm("x permutation", &x)?;
        check_perm("y permutation", &y)?;
        Ok(Assignment { x, y })
    }

    pub(crate) fn new_unchecked(x: Vec<usize>, y: Vec<usize>) -> Self {
        debug_assert!(check_perm("x", &x).is_ok() && check_perm("y", &y).is_ok());
        Assignment { x, y }
    }

    pub fn identity(m: usize, n: usize) -> Self {
        Assignment {
            x: (0..m).collect(),
            y: (0..n).collect(),
        }
    }

    pub fn x(&self) -> &[usize] {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn swap_sides(&self) -> Assignment {
        Assignment {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    /// The 0-1 doubly stochastic pair encoding this assignment.
    pub fn to_fractional(&self) -> FractionalSolution {
        let perm_matrix = |p: &[usize]| Matrix::from_fn(p.len(), |i, j| if p[i] == j { 1.0 } else { 0.0 });
        FractionalSolution {
            x: perm_matrix(&self.x),
            y: perm_matrix(&self.y),
        }
    }
}

/// A feasible point of the continuous relaxation: a pair of doubly stochastic matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    x: Matrix,
    y: Matrix,
}

fn check_doubly_stochastic(what: &'static str, mat: &Matrix, tol: f64) -> Result<()> {
    mat.check_finite(what)?;
    let k = mat.dim();
    for i in 0..k {
        for j in 0..k {
            let v = mat[(i, j)];
            if v < -tol || v > 1.0 + tol {
                return Err(BapError::OutOfUnitRange {
                    what,
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    for i in 0..k {
        let sum: f64 = mat.row(i).iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(BapError::NotDoublyStochastic {
                what,
                kind: "row",
                index: i,
                sum,
            });
        }
    }
    for j in 0..k {
        let sum: f64 = (0..k).map(|i| mat[(i, j)]).sum();
        if (sum - 1.0).abs() > tol {
            return Err(BapError::NotDoublyStochastic {
                what,
                kind: "column",
                index: j,
                sum,
            });
        }
    }
    Ok(())
}

impl FractionalSolution {
    pub fn new(x: Matrix, y: Matrix) -> Result<Self> {
        Self::with_tolerance(x, y, FEASIBILITY_TOL)
    }

    pub fn with_tolerance(x: Matrix, y: Matrix, tol: f64) -> Result<Self> {
        check_doubly_stochastic("x", &x, tol)?;
        check_doubly_stochastic("y", &y, tol)?;
        Ok(FractionalSolution { x, y })
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &Matrix {
        &self.y
    }
}

/// Objective value split into its quadratic and two linear parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub total: f64,
    pub quadratic: f64,
    pub linear_x: f64,
    pub linear_y: f64,
}

fn check_solution_dims(instance: &Instance, m: usize, n: usize) -> Result<()> {
    if m != instance.m() {
        return Err(BapError::Dimension {
            what: "x side",
            expected: instance.m(),
            actual: m,
        });
    }
    if n != instance.n() {
        return Err(BapError::Dimension {
            what: "y side",
            expected: instance.n(),
            actual: n,
        });
    }
    Ok(())
}

/// Objective `f(x, y)` of an assignment, in `O(mn)`.
pub fn evaluate(instance: &Instance, sol: &Assignment) -> Result<ObjectiveValue> {
    check_solution_dims(instance, sol.m(), sol.n())?;
    Ok(evaluate_unchecked(instance, sol.x(), sol.y()))
}

pub(crate) fn evaluate_unchecked(instance: &Instance, x: &[usize], y: &[usize]) -> ObjectiveValue {
    let q = instance.q();
    let mut quadratic = 0.0;
    for (i, &j) in x.iter().enumerate() {
        for (k, &l) in y.iter().enumerate() {
            quadratic += q.get(i, j, k, l);
        }
    }
    let linear_x = instance.c().assignment_value(x);
    let linear_y = instance.d().assignment_value(y);
    ObjectiveValue {
        total: quadratic + linear_x + linear_y,
        quadratic,
        linear_x,
        linear_y,
    }
}

/// The bilinear objective at a fractional point, in `O(m^2 n^2)`.
pub fn evaluate_fractional(instance: &Instance, frac: &FractionalSolution) -> Result<f64> {
    check_solution_dims(instance, frac.x().dim(), frac.y().dim())?;
    let (m, n) = (instance.m(), instance.n());
    let ys = frac.y().as_slice();
    let mut quadratic = 0.0;
    for i in 0..m {
        for j in 0..m {
            let xv = frac.x()[(i, j)];
            if xv == 0.0 {
                continue;
            }
            let inner: f64 = instance.q().block(i, j).iter().zip(ys).map(|(q, y)| q * y).sum();
            quadratic += xv * inner;
        }
    }
    let dot = |a: &Matrix, b: &Matrix| a.as_slice().iter().zip(b.as_slice()).map(|(u, v)| u * v).sum::<f64>();
    debug_assert_eq!(ys.len(), n * n);
    Ok(quadratic + dot(instance.c(), frac.x()) + dot(instance.d(), frac.y()))
}

/// Every feasible solution, lexicographically by `x` and then by `y`.
///
/// Refuses when `m! * n!` exceeds `cap`. The returned iterator is independent
/// of any other; call again to restart.
pub fn enumerate_assignments(m: usize, n: usize, cap: EnumCap) -> Result<impl Iterator<Item = Assignment>> {
    cap.check(factorial(m).saturating_mul(factorial(n)))?;
    let xs = permutations(m);
    let ys = permutations(n);
    Ok(xs.into_iter().flat_map(move |x| {
        ys.clone()
            .into_iter()
            .map(move |y| Assignment::new_unchecked(x.clone(), y))
    }))
}
