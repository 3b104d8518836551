//! Exhaustive statistics over the solution set: value profile, the count of
//! solutions no better than average, and the cyclic-shift equivalence classes.

use serde::{Deserialize, Serialize};

use crate::error::{BapError, Result};
use crate::exact::all_values;
use crate::heuristics::average_value;
use crate::model::{evaluate, factorial, permutations, Assignment, EnumCap, Instance};

/// Slack applied toward inclusion when comparing against the average.
pub const AVERAGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueProfile {
    /// All objective values in enumeration order.
    pub values: Vec<f64>,
    pub mean: f64,
    /// Lower middle element for an even count.
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

pub fn value_profile(instance: &Instance, cap: EnumCap) -> Result<ValueProfile> {
    let values = all_values(instance, cap)?;
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(ValueProfile {
        mean,
        median: sorted[(sorted.len() - 1) / 2],
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        values,
    })
}

/// Number of solutions with `f(x, y) >= A(Q, C, D)`, counted with [`AVERAGE_SLACK`].
pub fn domination_count(instance: &Instance, cap: EnumCap) -> Result<u64> {
    let avg = average_value(instance);
    Ok(all_values(instance, cap)?
        .into_iter()
        .filter(|&v| v >= avg - AVERAGE_SLACK)
        .count() as u64)
}

/// `(m-1)! (n-1)!`: the guaranteed number of solutions no better than average.
pub fn domination_lower_bound(m: usize, n: usize) -> u128 {
    factorial(m - 1).saturating_mul(factorial(n - 1))
}

/// The `mn` solutions `(x + a mod m, y + b mod n)` for `a < m`, `b < n`, ordered by `a` then `b`.
pub fn equivalence_class(m: usize, n: usize, representative: &Assignment) -> Result<Vec<Assignment>> {
    if representative.m() != m || representative.n() != n {
        return Err(BapError::Dimension {
            what: "class representative",
            expected: if representative.m() != m { m } else { n },
            actual: if representative.m() != m { representative.m() } else { representative.n() },
        });
    }
    let mut class = Vec::with_capacity(m * n);
    for a in 0..m {
        let x: Vec<usize> = representative.x().iter().map(|&j| (j + a) % m).collect();
        for b in 0..n {
            let y: Vec<usize> = representative.y().iter().map(|&l| (l + b) % n).collect();
            class.push(Assignment::new_unchecked(x.clone(), y));
        }
    }
    Ok(class)
}

/// One representative per class: the solutions with `x(0) = 0` and `y(0) = 0`,
/// in lexicographic order.
pub fn canonical_representatives(m: usize, n: usize, cap: EnumCap) -> Result<Vec<Assignment>> {
    cap.check(domination_lower_bound(m, n))?;
    let xs: Vec<_> = permutations(m).into_iter().filter(|p| p[0] == 0).collect();
    let ys: Vec<_> = permutations(n).into_iter().filter(|p| p[0] == 0).collect();
    Ok(xs
        .iter()
        .flat_map(|x| ys.iter().map(move |y| Assignment::new_unchecked(x.clone(), y.clone())))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Min, max and mean objective over the class of `representative`; the mean always equals the average.
pub fn class_average_check(instance: &Instance, representative: &Assignment) -> Result<ClassStats> {
    let class = equivalence_class(instance.m(), instance.n(), representative)?;
    let mut stats = ClassStats {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        mean: 0.0,
    };
    let mut sum = 0.0;
    for sol in &class {
        let v = evaluate(instance, sol)?.total;
        stats.min = stats.min.min(v);
        stats.max = stats.max.max(v);
        sum += v;
    }
    stats.mean = sum / class.len() as f64;
    Ok(stats)
}
