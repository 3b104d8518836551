//! Exact solvers: the exhaustive oracle over all `m! n!` solutions and the
//! enumerate-`x`, solve-`y` method that needs only `m!` assignment problems.

use rayon::prelude::*;

use crate::error::Result;
use crate::lap::{solve_lap, Sense};
use crate::model::{evaluate_unchecked, factorial, permutations, Assignment, EnumCap, Instance, ObjectiveValue};

fn pick_better(a: (usize, Assignment, ObjectiveValue), b: (usize, Assignment, ObjectiveValue)) -> (usize, Assignment, ObjectiveValue) {
    if b.2.total < a.2.total || (b.2.total == a.2.total && b.0 < a.0) {
        b
    } else {
        a
    }
}

/// Minimizer over every feasible solution; ties go to the first in enumeration order.
///
/// Work is split across threads by `x` permutation and merged with an
/// order-aware minimum, so the result does not depend on scheduling.
pub fn brute_force(instance: &Instance, cap: EnumCap) -> Result<(Assignment, ObjectiveValue)> {
    let (m, n) = (instance.m(), instance.n());
    cap.check(factorial(m).saturating_mul(factorial(n)))?;
    let xs = permutations(m);
    let ys = permutations(n);
    let best = xs
        .par_iter()
        .enumerate()
        .map(|(xi, x)| {
            let mut best_y = 0;
            let mut best_val = evaluate_unchecked(instance, x, &ys[0]);
            for (yi, y) in ys.iter().enumerate().skip(1) {
                let val = evaluate_unchecked(instance, x, y);
                if val.total < best_val.total {
                    best_y = yi;
                    best_val = val;
                }
            }
            (xi, Assignment::new_unchecked(x.clone(), ys[best_y].clone()), best_val)
        })
        .reduce_with(pick_better)
        .expect("at least one permutation");
    Ok((best.1, best.2))
}

/// Exact optimum by fixing every `x` and solving the induced assignment problem for `y`.
pub fn solve_by_x_enumeration(instance: &Instance, cap: EnumCap) -> Result<(Assignment, ObjectiveValue)> {
    cap.check(factorial(instance.m()))?;
    let xs = permutations(instance.m());
    let best = xs
        .into_par_iter()
        .enumerate()
        .map(|(xi, x)| {
            let g = instance.y_costs_given_x(&x);
            let y = solve_lap(&g, Sense::Minimize).expect("finite square costs").perm;
            let val = evaluate_unchecked(instance, &x, &y);
            (xi, Assignment::new_unchecked(x, y), val)
        })
        .reduce_with(pick_better)
        .expect("at least one permutation");
    Ok((best.1, best.2))
}

/// Objective values of every solution, in enumeration order.
pub fn all_values(instance: &Instance, cap: EnumCap) -> Result<Vec<f64>> {
    let (m, n) = (instance.m(), instance.n());
    cap.check(factorial(m).saturating_mul(factorial(n)))?;
    let xs = permutations(m);
    let ys = permutations(n);
    Ok(xs
        .par_iter()
        .flat_map_iter(|x| ys.iter().map(move |y| evaluate_unchecked(instance, x, y).total))
        .collect())
}

/// Median of all objective values; the lower middle element when the count is even.
///
/// Exhaustive only: no polynomial method is known.
pub fn median_value(instance: &Instance, cap: EnumCap) -> Result<f64> {
    let mut values = all_values(instance, cap)?;
    values.sort_by(f64::total_cmp);
    Ok(values[(values.len() - 1) / 2])
}
