//! Linear assignment subsolver.
//!
//! Shortest augmenting path Hungarian method with row and column potentials,
//! `O(k^3)` on a dense `k x k` matrix. Maximization negates the costs.

use crate::error::{BapError, Result};
use crate::model::{factorial, permutations, EnumCap, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// An optimal permutation and its objective `sum_i cost[i][perm[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LapResult {
    pub perm: Vec<usize>,
    pub value: f64,
}

pub fn solve_lap(cost: &Matrix, sense: Sense) -> Result<LapResult> {
    if cost.dim() == 0 {
        return Err(BapError::InvalidArgument("LAP needs at least one row".into()));
    }
    if let Some(index) = cost.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(BapError::NonFinite { what: "LAP cost", index });
    }
    let perm = match sense {
        Sense::Minimize => hungarian(cost.dim(), |i, j| cost[(i, j)]),
        Sense::Maximize => hungarian(cost.dim(), |i, j| -cost[(i, j)]),
    };
    let value = cost.assignment_value(&perm);
    Ok(LapResult { perm, value })
}

/// Builds a square matrix from rows and solves it; rejects ragged or non-square input.
pub fn solve_lap_rows<R: AsRef<[f64]>>(rows: &[R], sense: Sense) -> Result<LapResult> {
    solve_lap(&Matrix::from_rows(rows)?, sense)
}

/// Objective values of all `k!` permutations, lexicographic by permutation.
pub fn lap_value_all(cost: &Matrix, cap: EnumCap) -> Result<Vec<f64>> {
    cap.check(factorial(cost.dim()))?;
    Ok(permutations(cost.dim())
        .iter()
        .map(|p| cost.assignment_value(p))
        .collect())
}

// Rows are 1-based inside; index 0 is the virtual source column.
fn hungarian(k: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    let mut u = vec![0.0f64; k + 1];
    let mut v = vec![0.0f64; k + 1];
    let mut row_of = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    let mut min_slack = vec![0.0f64; k + 1];
    let mut used = vec![false; k + 1];

    for i in 1..=k {
        row_of[0] = i;
        let mut j0 = 0usize;
        min_slack.iter_mut().for_each(|s| *s = f64::INFINITY);
        used.iter_mut().for_each(|b| *b = false);

        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let reduced = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if reduced < min_slack[j] {
                    min_slack[j] = reduced;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }

        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; k];
    for j in 1..=k {
        perm[row_of[j] - 1] = j - 1;
    }
    perm
}
