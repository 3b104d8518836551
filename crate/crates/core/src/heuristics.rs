//! Polynomial heuristics with guarantees.
//!
//! Rounding from a fractional point (round one side by an assignment problem,
//! then optimize the other side) never increases the objective. Rounding from
//! the uniform point, or taking the best cyclic shift pair, yields a solution
//! no worse than the average over all solutions.

use crate::error::{BapError, Result};
use crate::lap::{solve_lap, Sense};
use crate::model::{evaluate, Assignment, FractionalSolution, Instance, Matrix};

fn lap_min(cost: &Matrix) -> Vec<usize> {
    solve_lap(cost, Sense::Minimize).expect("costs are finite and square").perm
}

fn check_frac_dims(instance: &Instance, frac: &FractionalSolution) -> Result<()> {
    if frac.x().dim() != instance.m() {
        return Err(BapError::Dimension {
            what: "fractional x side",
            expected: instance.m(),
            actual: frac.x().dim(),
        });
    }
    if frac.y().dim() != instance.n() {
        return Err(BapError::Dimension {
            what: "fractional y side",
            expected: instance.n(),
            actual: frac.y().dim(),
        });
    }
    Ok(())
}

/// Round `x`, then optimize `y`.
///
/// `x*` minimizes `h_ij = c_ij + sum_kl q_ijkl ybar_kl`; `y*` minimizes
/// `g_kl = d_kl + sum_i q_{i x*_i k l}`.
pub fn round_x_optimize_y(instance: &Instance, frac: &FractionalSolution) -> Result<Assignment> {
    check_frac_dims(instance, frac)?;
    let ybar = frac.y().as_slice();
    let h = Matrix::from_fn(instance.m(), |i, j| {
        instance.c()[(i, j)]
            + instance
                .q()
                .block(i, j)
                .iter()
                .zip(ybar)
                .map(|(q, y)| q * y)
                .sum::<f64>()
    });
    let x = lap_min(&h);
    let y = lap_min(&instance.y_costs_given_x(&x));
    Ok(Assignment::new_unchecked(x, y))
}

/// Round `y`, then optimize `x`. Mirror image of [`round_x_optimize_y`].
pub fn round_y_optimize_x(instance: &Instance, frac: &FractionalSolution) -> Result<Assignment> {
    check_frac_dims(instance, frac)?;
    let (m, n) = (instance.m(), instance.n());
    let mut g = instance.d().as_slice().to_vec();
    for i in 0..m {
        for j in 0..m {
            let xv = frac.x()[(i, j)];
            if xv == 0.0 {
                continue;
            }
            for (acc, q) in g.iter_mut().zip(instance.q().block(i, j)) {
                *acc += q * xv;
            }
        }
    }
    let y = lap_min(&Matrix::new(n, g)?);
    let x = lap_min(&instance.x_costs_given_y(&y));
    Ok(Assignment::new_unchecked(x, y))
}

/// Closed-form mean of the objective over all `m! n!` solutions:
/// `sum(Q) / (mn) + sum(C) / m + sum(D) / n`.
pub fn average_value(instance: &Instance) -> f64 {
    let (m, n) = (instance.m() as f64, instance.n() as f64);
    instance.q().sum() / (m * n) + instance.c().sum() / m + instance.d().sum() / n
}

/// The doubly stochastic pair with every entry `1/m` and `1/n`.
pub fn uniform_fractional(m: usize, n: usize) -> FractionalSolution {
    FractionalSolution::new(
        Matrix::filled(m, 1.0 / m as f64),
        Matrix::filled(n, 1.0 / n as f64),
    )
    .expect("uniform matrices are doubly stochastic")
}

fn cyclic(len: usize, shift: usize) -> Vec<usize> {
    (0..len).map(|i| (i + shift) % len).collect()
}

/// The pair `(x^a, y^b)` with `x^a[i] = (i + a) mod m` and `y^b[k] = (k + b) mod n`.
pub fn shift_solution(instance: &Instance, a: usize, b: usize) -> Result<Assignment> {
    let (m, n) = (instance.m(), instance.n());
    if a >= m || b >= n {
        return Err(BapError::InvalidArgument(format!(
            "shift ({a}, {b}) outside [0, {m}) x [0, {n})"
        )));
    }
    Ok(Assignment::new_unchecked(cyclic(m, a), cyclic(n, b)))
}

/// Objective of `(x^a, y^b)` from the closed form, without building the assignment.
pub fn shift_value(instance: &Instance, a: usize, b: usize) -> f64 {
    let (m, n) = (instance.m(), instance.n());
    let q = instance.q();
    let mut total = 0.0;
    for i in 0..m {
        let j = (i + a) % m;
        for k in 0..n {
            total += q.get(i, j, k, (k + b) % n);
        }
        total += instance.c()[(i, j)];
    }
    for k in 0..n {
        total += instance.d()[(k, (k + b) % n)];
    }
    total
}

/// Values of the whole shift family, indexed `a * n + b`.
pub fn shift_values(instance: &Instance) -> Vec<f64> {
    let (m, n) = (instance.m(), instance.n());
    (0..m)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| shift_value(instance, a, b))
        .collect()
}

/// Best pair of the shift family; ties go to the smallest `(a, b)`.
pub fn best_shift(instance: &Instance) -> (Assignment, f64) {
    let n = instance.n();
    let values = shift_values(instance);
    let (idx, &val) = values
        .iter()
        .enumerate()
        .fold(None::<(usize, &f64)>, |best, cur| match best {
            Some(b) if b.1 <= cur.1 => Some(b),
            _ => Some(cur),
        })
        .expect("shift family is non-empty");
    let sol = shift_solution(instance, idx / n, idx % n).expect("index in range");
    (sol, val)
}

/// Default round limit for [`alternating_search`].
pub const DEFAULT_MAX_ROUNDS: usize = 100;

/// Stop once a full round improves by less than this.
pub const IMPROVEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub assignment: Assignment,
    pub value: f64,
    /// Objective at the start and after every half-step.
    pub trace: Vec<f64>,
    pub rounds: usize,
    /// False when the round limit cut the search short.
    pub converged: bool,
}

/// Alternating descent: re-optimize `y` for fixed `x`, then `x` for fixed `y`,
/// until a round gains less than [`IMPROVEMENT_TOL`] or `max_rounds` is hit.
///
/// A half-step result is accepted only when it does not raise the objective,
/// so the trace is non-increasing.
pub fn alternating_search(instance: &Instance, start: &Assignment, max_rounds: usize) -> Result<SearchOutcome> {
    let mut current = start.clone();
    let mut value = evaluate(instance, &current)?.total;
    let mut trace = vec![value];
    let mut rounds = 0;
    let mut converged = false;

    while rounds < max_rounds {
        rounds += 1;
        let round_start = value;

        let y = lap_min(&instance.y_costs_given_x(current.x()));
        let cand = Assignment::new_unchecked(current.x().to_vec(), y);
        let v = evaluate(instance, &cand)?.total;
        if v <= value {
            current = cand;
            value = v;
        }
        trace.push(value);

        let x = lap_min(&instance.x_costs_given_y(current.y()));
        let cand = Assignment::new_unchecked(x, current.y().to_vec());
        let v = evaluate(instance, &cand)?.total;
        if v <= value {
            current = cand;
            value = v;
        }
        trace.push(value);

        if round_start - value < IMPROVEMENT_TOL {
            converged = true;
            break;
        }
    }

    Ok(SearchOutcome {
        assignment: current,
        value,
        trace,
        rounds,
        converged,
    })
}
