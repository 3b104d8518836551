//! Structure-aware dispatch: try the exact polynomial cases first, then exact
//! enumeration over `x`, then the best of the heuristics.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Result;
use crate::exact::solve_by_x_enumeration;
use crate::heuristics::{alternating_search, best_shift, round_x_optimize_y, uniform_fractional, DEFAULT_MAX_ROUNDS};
use crate::model::{evaluate, factorial, Assignment, EnumCap, Instance, ObjectiveValue};
use crate::structure::{
    check_linearizable, cvp_decompose, extract_linearization, rank_one_solve, solve_cvp, solve_linearizable, FactoredQ,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AutoPath {
    Cvp,
    Linearizable,
    RankOne,
    EnumX,
    Heuristic,
}

impl AutoPath {
    /// Whether the path guarantees an optimal solution.
    pub fn exact(self) -> bool {
        self != AutoPath::Heuristic
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutoOutcome {
    pub path: AutoPath,
    pub assignment: Assignment,
    pub value: ObjectiveValue,
    /// Evidence for the chosen path, e.g. the linearization or the decomposition matrix.
    pub certificates: Value,
}

/// Solves `instance` by the first applicable path.
///
/// `factored` is the rank-one form of `Q` in the instance's canonical orientation, if known.
pub fn solve_auto(instance: &Instance, factored: Option<&FactoredQ>, cap: EnumCap) -> Result<AutoOutcome> {
    let done = |path, (assignment, value): (Assignment, ObjectiveValue), certificates| AutoOutcome {
        path,
        assignment,
        value,
        certificates,
    };

    if let Some(w) = cvp_decompose(instance) {
        let sol = solve_cvp(instance, &w)?;
        return Ok(done(AutoPath::Cvp, sol, json!({ "W": w.as_slice() })));
    }
    if let Some(dec) = check_linearizable(instance.q(), None) {
        let lin = extract_linearization(&dec);
        let sol = solve_linearizable(instance, &lin)?;
        let cert = json!({ "A": lin.a.as_slice(), "B": lin.b.as_slice(), "residual": dec.max_residual(instance.q()) });
        return Ok(done(AutoPath::Linearizable, sol, cert));
    }
    if let Some(f) = factored.filter(|f| f.rank() == 1) {
        if let Ok(sol) = rank_one_solve(instance, f) {
            return Ok(done(AutoPath::RankOne, sol, json!({ "rank": 1 })));
        }
    }
    if factorial(instance.m()) <= cap.0 as u128 {
        let sol = solve_by_x_enumeration(instance, cap)?;
        return Ok(done(AutoPath::EnumX, sol, json!({ "xCount": factorial(instance.m()) as u64 })));
    }

    let rounded = round_x_optimize_y(instance, &uniform_fractional(instance.m(), instance.n()))?;
    let (shift, _) = best_shift(instance);
    let search = alternating_search(instance, &shift, DEFAULT_MAX_ROUNDS)?;
    let mut best: Option<(&str, Assignment, ObjectiveValue)> = None;
    for (name, sol) in [("rxoy", rounded), ("shift", shift), ("alt", search.assignment)] {
        let v = evaluate(instance, &sol)?;
        if best.as_ref().is_none_or(|(_, _, b)| v.total < b.total) {
            best = Some((name, sol, v));
        }
    }
    let (name, sol, v) = best.expect("three candidates");
    Ok(done(AutoPath::Heuristic, (sol, v), json!({ "winner": name })))
}
