//! Constructions that map other problems into BAP instances.

use crate::error::{BapError, Result};
use crate::model::{Assignment, Instance, Matrix, QuadCost};

/// `1 + sum |q'|`: large enough that any `x != y` solution loses to every `x = y` one.
pub fn default_penalty(qprime: &QuadCost) -> f64 {
    1.0 + qprime.as_slice().iter().map(|v| v.abs()).sum::<f64>()
}

/// QAP objective `sum q'_{i p(i) k p(k)}` of a single permutation.
pub fn qap_value(qprime: &QuadCost, perm: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, &j) in perm.iter().enumerate() {
        for (k, &l) in perm.iter().enumerate() {
            total += qprime.get(i, j, k, l);
        }
    }
    total
}

/// Embeds a QAP with `n x n x n x n` costs `Q'` as a BAP whose optimal solutions have `x = y`.
///
/// Adds `L` to every `c_ij` and `d_ij` and subtracts `2L` from every `q_ijij`; the added
/// terms total `L * sum (x_ij - y_ij)^2`, which vanishes exactly when `x = y`.
pub fn qap_penalty_reduction(qprime: &QuadCost, penalty: f64) -> Result<Instance> {
    if qprime.m() != qprime.n() {
        return Err(BapError::Dimension {
            what: "QAP cost sides",
            expected: qprime.m(),
            actual: qprime.n(),
        });
    }
    if !(penalty > 0.0 && penalty.is_finite()) {
        return Err(BapError::InvalidArgument(format!("penalty must be positive, got {penalty}")));
    }
    let n = qprime.n();
    let mut q = qprime.clone();
    for i in 0..n {
        for j in 0..n {
            q.set(i, j, i, j, qprime.get(i, j, i, j) - 2.0 * penalty);
        }
    }
    Instance::new(q, Matrix::filled(n, penalty), Matrix::filled(n, penalty))
}

/// Axial 3AP with costs `a[(i*n + j)*n + k]` as a BAP with `q_ijkl = a_ijl` when `j = k`.
///
/// The BAP value of `(x, y)` is `sum_i a_{i, x(i), y(x(i))}`.
pub fn tap_to_bap(n: usize, a: &[f64]) -> Result<Instance> {
    if a.len() != n * n * n {
        return Err(BapError::Dimension {
            what: "3AP cube entries",
            expected: n * n * n,
            actual: a.len(),
        });
    }
    let q = QuadCost::from_fn(n, n, |i, j, k, l| if j == k { a[(i * n + j) * n + l] } else { 0.0 });
    Instance::new(q, Matrix::zeros(n), Matrix::zeros(n))
}

fn check_edges(n: usize, edges: &[(usize, usize)], what: &str) -> Result<()> {
    match edges.iter().find(|(u, v)| *u >= n || *v >= n) {
        Some((u, v)) => Err(BapError::InvalidArgument(format!("{what} edge ({u}, {v}) outside 0..{n}"))),
        None => Ok(()),
    }
}

/// DISJOINT MATCHINGS on `K_{n,n}` with edge sets `E1`, `E2` as a BAP with identity `Q`.
///
/// `c_ij` is `1/(alpha+1)` for first-row `E1` edges, `0` for other `E1` edges, `1` otherwise;
/// `d_ij` is `0` on `E2` and `1` otherwise. Disjoint perfect matchings exist iff the
/// optimum is `1/(alpha+1)`; every other solution costs at least `1`. With `zero_one`
/// the `1/(alpha+1)` entries become `0`.
pub fn disjoint_matchings_to_bap(
    n: usize,
    e1: &[(usize, usize)],
    e2: &[(usize, usize)],
    alpha: f64,
    zero_one: bool,
) -> Result<Instance> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(BapError::InvalidArgument(format!("alpha must exceed 1, got {alpha}")));
    }
    check_edges(n, e1, "E1")?;
    check_edges(n, e2, "E2")?;
    let first_row = if zero_one { 0.0 } else { 1.0 / (alpha + 1.0) };
    let mut c = vec![1.0; n * n];
    for &(i, j) in e1 {
        c[i * n + j] = if i == 0 { first_row } else { 0.0 };
    }
    let mut d = vec![1.0; n * n];
    for &(k, l) in e2 {
        d[k * n + l] = 0.0;
    }
    Instance::new(QuadCost::identity(n), Matrix::new(n, c)?, Matrix::new(n, d)?)
}

/// `1 + sum |entries|` of the instance: a safe block penalty for [`pad_instance`].
pub fn default_padding_penalty(instance: &Instance) -> f64 {
    1.0 + instance.abs_sum()
}

/// Embeds an `(m, n)` instance into sizes `(n, target_n)`.
///
/// The original arrays occupy the leading blocks; the trailing diagonal blocks
/// of `C` and `D` are `0`, the mixed blocks cost `penalty`, and the new part of
/// `Q` is zero. Optimal values coincide and [`recover_solution`] maps optima back.
pub fn pad_instance(instance: &Instance, target_n: usize, penalty: f64) -> Result<Instance> {
    let (m, n) = (instance.m(), instance.n());
    if target_n < n {
        return Err(BapError::InvalidArgument(format!(
            "target size {target_n} is below n = {n}"
        )));
    }
    if !(penalty > 0.0 && penalty.is_finite()) {
        return Err(BapError::InvalidArgument(format!("penalty must be positive, got {penalty}")));
    }
    let q = QuadCost::from_fn(n, target_n, |i, j, k, l| {
        if i < m && j < m && k < n && l < n {
            instance.q().get(i, j, k, l)
        } else {
            0.0
        }
    });
    let block = |orig: &Matrix, size: usize, i: usize, j: usize| {
        let inside = |v: usize| v < size;
        match (inside(i), inside(j)) {
            (true, true) => orig[(i, j)],
            (false, false) => 0.0,
            _ => penalty,
        }
    };
    let c = Matrix::from_fn(n, |i, j| block(instance.c(), m, i, j));
    let d = Matrix::from_fn(target_n, |k, l| block(instance.d(), n, k, l));
    Instance::new(q, c, d)
}

/// Restricts a padded solution to the original index sets.
///
/// Fails with [`BapError::CrossingBlocks`] if an original row is sent outside the original block.
pub fn recover_solution(padded: &Assignment, m: usize, n: usize) -> Result<Assignment> {
    if padded.m() < m || padded.n() < n {
        return Err(BapError::Dimension {
            what: "padded solution",
            expected: n,
            actual: padded.n(),
        });
    }
    let x = &padded.x()[..m];
    if let Some(row) = x.iter().position(|&j| j >= m) {
        return Err(BapError::CrossingBlocks { row });
    }
    let y = &padded.y()[..n];
    if let Some(row) = y.iter().position(|&l| l >= n) {
        return Err(BapError::CrossingBlocks { row });
    }
    Assignment::new(x.to_vec(), y.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force;
    use crate::model::{evaluate, permutations, EnumCap};
    use crate::rng::BapRng;

    fn cap() -> EnumCap {
        EnumCap::default()
    }

    #[test]
    fn qap_identity_pair_keeps_qap_value() {
        let qp = QuadCost::from_fn(3, 3, |i, j, k, l| ((i * 7 + j * 5 + k * 3 + l) % 10) as f64);
        let inst = qap_penalty_reduction(&qp, 4.0).unwrap();
        let id = Assignment::identity(3, 3);
        assert_eq!(evaluate(&inst, &id).unwrap().total, qap_value(&qp, &[0, 1, 2]));
        assert!(qap_penalty_reduction(&qp, 0.0).is_err());
    }

    #[test]
    fn qap_zero_costs() {
        let qp = QuadCost::zeros(3, 3);
        assert_eq!(default_penalty(&qp), 1.0);
        let inst = qap_penalty_reduction(&qp, 5.0).unwrap();
        let (sol, val) = brute_force(&inst, cap()).unwrap();
        assert_eq!(val.total, 0.0);
        assert_eq!(sol.x(), sol.y());
    }

    #[test]
    fn default_penalty_formula() {
        let qp = QuadCost::new(1, 1, vec![-10.0]).unwrap();
        assert_eq!(default_penalty(&qp), 11.0);
    }

    #[test]
    fn qap_random_optimum_has_equal_sides() {
        let mut rng = BapRng::new(11);
        let qp = QuadCost::from_fn(3, 3, |_, _, _, _| rng.int_in(0, 9) as f64);
        let inst = qap_penalty_reduction(&qp, default_penalty(&qp)).unwrap();
        let (sol, val) = brute_force(&inst, cap()).unwrap();
        assert_eq!(sol.x(), sol.y());
        let qap_opt = permutations(3).iter().map(|p| qap_value(&qp, p)).fold(f64::INFINITY, f64::min);
        assert_eq!(val.total, qap_opt);
    }

    #[test]
    fn tap_examples() {
        let zero = tap_to_bap(2, &[0.0; 8]).unwrap();
        assert_eq!(brute_force(&zero, cap()).unwrap().1.total, 0.0);

        let mut a = vec![0.0; 8];
        a[0] = 1.0;
        let inst = tap_to_bap(2, &a).unwrap();
        assert_eq!(brute_force(&inst, cap()).unwrap().1.total, 0.0);
        assert!(tap_to_bap(2, &[0.0; 7]).is_err());

        let cube: Vec<f64> = (0..27).map(|v| ((v * 13) % 17) as f64).collect();
        let inst = tap_to_bap(3, &cube).unwrap();
        for x in permutations(3) {
            for y in permutations(3) {
                let direct: f64 = (0..3).map(|i| cube[(i * 3 + x[i]) * 3 + y[x[i]]]).sum();
                let sol = Assignment::new(x.clone(), y.clone()).unwrap();
                assert_eq!(evaluate(&inst, &sol).unwrap().total, direct);
            }
        }
    }

    #[test]
    fn disjoint_matchings_small_cases() {
        let diag = [(0, 0), (1, 1)];
        let anti = [(0, 1), (1, 0)];
        let yes = disjoint_matchings_to_bap(2, &diag, &anti, 2.0, false).unwrap();
        assert_eq!(brute_force(&yes, cap()).unwrap().1.total, 1.0 / 3.0);

        let same = disjoint_matchings_to_bap(2, &diag, &diag, 2.0, false).unwrap();
        assert!(brute_force(&same, cap()).unwrap().1.total >= 1.0);

        let empty = disjoint_matchings_to_bap(2, &[], &anti, 2.0, false).unwrap();
        assert!(empty.c().as_slice().iter().all(|&v| v == 1.0));
        assert!(brute_force(&empty, cap()).unwrap().1.total >= 1.0);

        let zero_one = disjoint_matchings_to_bap(2, &diag, &anti, 2.0, true).unwrap();
        assert_eq!(brute_force(&zero_one, cap()).unwrap().1.total, 0.0);

        assert!(disjoint_matchings_to_bap(2, &diag, &anti, 1.0, false).is_err());
        assert!(disjoint_matchings_to_bap(2, &[(2, 0)], &anti, 2.0, false).is_err());
    }

    #[test]
    fn padding_preserves_optimum() {
        let mut rng = BapRng::new(3);
        let q = QuadCost::from_fn(2, 2, |_, _, _, _| rng.int_in(0, 9) as f64);
        let c = Matrix::from_fn(2, |_, _| rng.int_in(0, 9) as f64);
        let d = Matrix::from_fn(2, |_, _| rng.int_in(0, 9) as f64);
        let inst = Instance::new(q, c, d).unwrap();
        let padded = pad_instance(&inst, 3, 1e3).unwrap();
        assert_eq!((padded.m(), padded.n()), (2, 3));
        let (psol, pval) = brute_force(&padded, cap()).unwrap();
        let back = recover_solution(&psol, 2, 2).unwrap();
        let (_, val) = brute_force(&inst, cap()).unwrap();
        assert_eq!(pval.total, val.total);
        assert_eq!(evaluate(&inst, &back).unwrap().total, val.total);
    }

    #[test]
    fn padding_same_size_is_identity_when_square() {
        let inst = Instance::new(QuadCost::identity(2), Matrix::filled(2, 1.0), Matrix::zeros(2)).unwrap();
        assert_eq!(pad_instance(&inst, 2, 5.0).unwrap(), inst);
        assert!(pad_instance(&inst, 1, 5.0).is_err());
    }

    #[test]
    fn padding_zero_instance() {
        let inst = Instance::new(QuadCost::zeros(1, 2), Matrix::zeros(1), Matrix::zeros(2)).unwrap();
        let padded = pad_instance(&inst, 3, default_padding_penalty(&inst)).unwrap();
        let (sol, val) = brute_force(&padded, cap()).unwrap();
        assert_eq!(val.total, 0.0);
        assert!(recover_solution(&sol, 1, 2).is_ok());
    }

    #[test]
    fn recover_examples() {
        let id = Assignment::identity(3, 4);
        assert_eq!(recover_solution(&id, 2, 3).unwrap(), Assignment::identity(2, 3));
        let crossing = Assignment::new(vec![2, 1, 0], vec![0, 1, 2, 3]).unwrap();
        assert!(matches!(recover_solution(&crossing, 2, 3), Err(BapError::CrossingBlocks { row: 0 })));
    }
}
