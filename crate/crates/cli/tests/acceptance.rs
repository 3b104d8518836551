//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Run alone with `cargo test -p bap-cli --test acceptance`.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use bap::analysis::{domination_count, domination_lower_bound};
use bap::exact::{all_values, brute_force, solve_by_x_enumeration};
use bap::generate::{generate, GeneratorSpec, Kind, SumSide};
use bap::heuristics::{
    alternating_search, average_value, best_shift, round_x_optimize_y, round_y_optimize_x, shift_values,
    uniform_fractional, DEFAULT_MAX_ROUNDS,
};
use bap::model::{evaluate_fractional, permutations};
use bap::reductions::{default_penalty, disjoint_matchings_to_bap, qap_penalty_reduction, qap_value, tap_to_bap};
use bap::structure::{check_linearizable, cvp_decompose, extract_linearization, rank_one_solve, solve_cvp, solve_linearizable};
use bap::{evaluate, Assignment, BapRng, EnumCap, FractionalSolution, Instance, Matrix, QuadCost};

const MASTER_SEED: u64 = 20_240_917;
const TOL: f64 = 1e-9;

type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn cap() -> EnumCap {
    EnumCap::default()
}

/// Sizes `1 <= m <= n <= max` drawn from `rng`.
fn draw_sizes(rng: &mut BapRng, lo: usize, max: usize) -> (usize, usize) {
    let a = rng.int_in(lo as i64, max as i64) as usize;
    let b = rng.int_in(lo as i64, max as i64) as usize;
    (a.min(b), a.max(b))
}

fn build(kind: Kind, m: usize, n: usize, seed: u64) -> bap::InstanceFile {
    generate(&GeneratorSpec::new(kind, m, n, seed)).expect("generator")
}

/// The 200 instances shared by criteria 1, 3, 4, 5 and 10.
fn base_instances() -> Vec<Instance> {
    let mut rng = BapRng::new(MASTER_SEED);
    (0..200)
        .map(|_| {
            let (m, n) = draw_sizes(&mut rng, 1, 4);
            build(Kind::Uniform, m, n, rng.next_u64()).to_instance().unwrap()
        })
        .collect()
}

fn birkhoff(rng: &mut BapRng, dim: usize) -> Matrix {
    let terms = 1 + rng.index(4);
    let weights: Vec<f64> = (0..terms).map(|_| rng.unit() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut data = vec![0.0; dim * dim];
    for w in weights {
        for (i, j) in rng.permutation(dim).into_iter().enumerate() {
            data[i * dim + j] += w / total;
        }
    }
    Matrix::new(dim, data).unwrap()
}

fn c1_oracle(insts: &[Instance]) -> Verdict {
    let start = Instant::now();
    let mismatches = insts
        .iter()
        .filter(|inst| {
            let bf = brute_force(inst, cap()).unwrap().1.total;
            solve_by_x_enumeration(inst, cap()).unwrap().1.total != bf
        })
        .count();
    let secs = start.elapsed().as_secs_f64();
    verdict(mismatches == 0 && secs < 60.0, format!("{} instances, {mismatches} mismatches, {secs:.3}s", insts.len()))
}

fn c2_rounding(insts: &[Instance]) -> Verdict {
    let mut rng = BapRng::new(MASTER_SEED ^ 2);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for inst in insts {
        let frac = FractionalSolution::new(birkhoff(&mut rng, inst.m()), birkhoff(&mut rng, inst.n())).unwrap();
        let fv = evaluate_fractional(inst, &frac).unwrap();
        for sol in [round_x_optimize_y(inst, &frac).unwrap(), round_y_optimize_x(inst, &frac).unwrap()] {
            let gap = evaluate(inst, &sol).unwrap().total - fv;
            worst = worst.max(gap);
            if gap > TOL {
                violations += 1;
            }
        }
    }
    verdict(violations == 0, format!("{} pairs, {violations} violations, max f(rounded)-f(frac) = {worst:.3e}", insts.len()))
}

fn c3_average(insts: &[Instance]) -> Verdict {
    let mut worst: f64 = 0.0;
    for inst in insts {
        let values = all_values(inst, cap()).unwrap();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        worst = worst.max((mean - average_value(inst)).abs());
    }
    verdict(worst <= TOL, format!("max |mean - A| = {worst:.3e}"))
}

fn c4_below_average(insts: &[Instance]) -> Verdict {
    let mut bad = 0;
    for inst in insts {
        let avg = average_value(inst);
        let rx = evaluate(inst, &round_x_optimize_y(inst, &uniform_fractional(inst.m(), inst.n())).unwrap()).unwrap();
        let (_, shift) = best_shift(inst);
        let family = shift_values(inst);
        let lo = family.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = family.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if rx.total > avg + TOL || shift > avg + TOL || lo > avg + TOL || hi < avg - TOL {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("{} instances, {bad} above average", insts.len()))
}

fn c5_domination(insts: &[Instance]) -> Verdict {
    let below = insts
        .iter()
        .filter(|inst| (domination_count(inst, cap()).unwrap() as u128) < domination_lower_bound(inst.m(), inst.n()))
        .count();
    let mut tight = Vec::new();
    for m in [2, 3] {
        let q = QuadCost::from_fn(m, m, |i, j, k, l| if i + j + k + l == 0 { 1.0 } else { 0.0 });
        let inst = Instance::new(q, Matrix::zeros(m), Matrix::zeros(m)).unwrap();
        tight.push((domination_count(&inst, cap()).unwrap() as u128, domination_lower_bound(m, m)));
    }
    let exact = tight.iter().all(|(c, b)| c == b);
    verdict(below == 0 && exact, format!("{below} below bound; tightness (count, bound) = {tight:?}"))
}

/// All 4-fold mixed differences anchored at 0 vanish.
fn four_point_identity(q: &QuadCost) -> bool {
    let (m, n) = (q.m(), q.n());
    let at = |idx: [usize; 4], mask: u8| {
        let c: Vec<usize> = (0..4).map(|b| if mask >> b & 1 == 1 { idx[b] } else { 0 }).collect();
        q.get(c[0], c[1], c[2], c[3])
    };
    for i in 1..m {
        for j in 1..m {
            for k in 1..n {
                for l in 1..n {
                    let d: f64 = (0..16u8)
                        .map(|mk| if mk.count_ones() % 2 == 0 { at([i, j, k, l], mk) } else { -at([i, j, k, l], mk) })
                        .sum();
                    if d.abs() > TOL * (1.0 + q.max_abs()) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn c6_linearizable() -> Verdict {
    let mut rng = BapRng::new(MASTER_SEED ^ 6);
    let mut failures = 0;
    for _ in 0..50 {
        let (m, n) = draw_sizes(&mut rng, 1, 3);
        let inst = build(Kind::Linearizable, m, n, rng.next_u64()).to_instance().unwrap();
        let ok = check_linearizable(inst.q(), None).is_some_and(|dec| {
            let (_, v) = solve_linearizable(&inst, &extract_linearization(&dec)).unwrap();
            v.total == brute_force(&inst, cap()).unwrap().1.total
        });
        if !ok {
            failures += 1;
        }
    }
    // sides of size one are always linearizable, so generic instances start at 2
    let (mut rejected, mut chance, mut wrong) = (0, 0, 0);
    for _ in 0..50 {
        let (m, n) = draw_sizes(&mut rng, 2, 3);
        let inst = build(Kind::Uniform, m, n, rng.next_u64()).to_instance().unwrap();
        match check_linearizable(inst.q(), None) {
            None => rejected += 1,
            Some(_) if four_point_identity(inst.q()) => chance += 1,
            Some(_) => wrong += 1,
        }
    }
    verdict(
        failures == 0 && wrong == 0,
        format!("generated: {failures}/50 failed; generic: {rejected} rejected, {chance} linearizable by chance, {wrong} false accepts"),
    )
}

fn c7_cvp() -> Verdict {
    let mut rng = BapRng::new(MASTER_SEED ^ 7);
    let mut failures = 0;
    for _ in 0..50 {
        let (m, n) = draw_sizes(&mut rng, 1, 4);
        let inst = build(Kind::Cvp, m, n, rng.next_u64()).to_instance().unwrap();
        let ok = cvp_decompose(&inst).is_some_and(|w| {
            solve_cvp(&inst, &w).unwrap().1.total == brute_force(&inst, cap()).unwrap().1.total
        });
        if !ok {
            failures += 1;
        }
    }
    verdict(failures == 0, format!("50 instances, {failures} failures"))
}

fn c8_rank_one() -> Verdict {
    let mut rng = BapRng::new(MASTER_SEED ^ 8);
    let mut failures = [0, 0];
    for (side, slot) in [(SumSide::D, 0), (SumSide::C, 1)] {
        for _ in 0..100 {
            let (m, n) = draw_sizes(&mut rng, 1, 4);
            let mut spec = GeneratorSpec::new(Kind::Rank, m, n, rng.next_u64());
            spec.lo = -20;
            spec.hi = 20;
            spec.sum_side = side;
            let file = generate(&spec).unwrap();
            let inst = file.to_instance().unwrap();
            let fq = file.factored().unwrap().unwrap();
            let ok = rank_one_solve(&inst, &fq)
                .is_ok_and(|(_, v)| v.total == brute_force(&inst, cap()).unwrap().1.total);
            if !ok {
                failures[slot] += 1;
            }
        }
    }
    verdict(failures == [0, 0], format!("sum-matrix D: {}/100 failed, sum-matrix C: {}/100 failed", failures[0], failures[1]))
}

/// Whether `E1` and `E2` contain edge-disjoint perfect matchings, by enumeration.
fn disjoint_matchings_exist(n: usize, e1: &[(usize, usize)], e2: &[(usize, usize)]) -> bool {
    let perms = permutations(n);
    let inside = |e: &[(usize, usize)], p: &[usize]| p.iter().enumerate().all(|(i, &j)| e.contains(&(i, j)));
    perms.iter().filter(|p| inside(e1, p)).any(|p| {
        perms.iter().filter(|r| inside(e2, r)).any(|r| p.iter().zip(r.iter()).all(|(a, b)| a != b))
    })
}

fn edges_from_bits(n: usize, bits: u32) -> Vec<(usize, usize)> {
    (0..n * n).filter(|b| bits >> b & 1 == 1).map(|b| (b / n, b % n)).collect()
}

fn c9_reductions() -> Verdict {
    let mut rng = BapRng::new(MASTER_SEED ^ 9);
    let perms = permutations(3);

    let mut qap_bad = 0;
    for _ in 0..50 {
        let qp = QuadCost::from_fn(3, 3, |_, _, _, _| rng.int_in(0, 99) as f64);
        let inst = qap_penalty_reduction(&qp, default_penalty(&qp)).unwrap();
        let (sol, v) = brute_force(&inst, cap()).unwrap();
        let qap_opt = perms.iter().map(|p| qap_value(&qp, p)).fold(f64::INFINITY, f64::min);
        if sol.x() != sol.y() || v.total != qap_opt {
            qap_bad += 1;
        }
    }

    let mut tap_bad = 0;
    for _ in 0..50 {
        let a: Vec<f64> = (0..27).map(|_| rng.int_in(0, 99) as f64).collect();
        let inst = tap_to_bap(3, &a).unwrap();
        let (_, v) = brute_force(&inst, cap()).unwrap();
        let mut tap_opt = f64::INFINITY;
        for p in &perms {
            for r in &perms {
                tap_opt = tap_opt.min((0..3).map(|i| a[(i * 3 + p[i]) * 3 + r[i]]).sum());
            }
        }
        if v.total != tap_opt {
            tap_bad += 1;
        }
    }

    let third = 1.0 / 3.0;
    let mut dm_bad = 0;
    let mut dm_yes = 0;
    let mut check = |n: usize, e1: Vec<(usize, usize)>, e2: Vec<(usize, usize)>| {
        let inst = disjoint_matchings_to_bap(n, &e1, &e2, 2.0, false).unwrap();
        let v = brute_force(&inst, cap()).unwrap().1.total;
        let exists = disjoint_matchings_exist(n, &e1, &e2);
        dm_yes += exists as usize;
        let ok = if exists { v == third } else { v >= 1.0 };
        if !ok {
            dm_bad += 1;
        }
    };
    for b1 in 0..16u32 {
        for b2 in 0..16u32 {
            check(2, edges_from_bits(2, b1), edges_from_bits(2, b2));
        }
    }
    for _ in 0..100 {
        let b1 = rng.next_u32() & 0x1ff;
        let b2 = rng.next_u32() & 0x1ff;
        check(3, edges_from_bits(3, b1), edges_from_bits(3, b2));
    }

    verdict(
        qap_bad + tap_bad + dm_bad == 0,
        format!("QAP {qap_bad}/50 bad, 3AP {tap_bad}/50 bad, matchings {dm_bad}/356 bad ({dm_yes} yes-instances)"),
    )
}

fn c10_alternating(insts: &[Instance]) -> Verdict {
    let mut rng = BapRng::new(MASTER_SEED ^ 10);
    let (mut bad, mut unconverged, mut max_rounds) = (0, 0, 0);
    for inst in insts {
        let start = Assignment::new(rng.permutation(inst.m()), rng.permutation(inst.n())).unwrap();
        let out = alternating_search(inst, &start, DEFAULT_MAX_ROUNDS).unwrap();
        if !out.trace.windows(2).all(|w| w[1] <= w[0]) || out.rounds > DEFAULT_MAX_ROUNDS {
            bad += 1;
        }
        unconverged += !out.converged as usize;
        max_rounds = max_rounds.max(out.rounds);
    }
    verdict(
        bad == 0 && unconverged == 0,
        format!("{} traces, {bad} non-monotone, {unconverged} hit the round limit, max rounds {max_rounds}", insts.len()),
    )
}

fn cli_run(dir: &Path, args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_bap"))
        .args(args)
        .current_dir(dir)
        .env_remove("BAP_ENUM_CAP")
        .output()
        .expect("run bap");
    (out.status.code().unwrap_or(-1), out.stdout)
}

/// Runs the same command script in `dir` and returns every stdout and written file, in order.
fn cli_session(dir: &Path) -> Vec<(String, i32, Vec<u8>)> {
    std::fs::write(dir.join("qap.json"), br#"{"n":2,"Q":[1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16]}"#).unwrap();
    let mut log = Vec::new();
    let mut files = Vec::new();
    for (kind, m, n, seed) in [("uniform", 3, 4, "11"), ("rank", 3, 3, "12"), ("cvp", 2, 4, "13"), ("linearizable", 3, 3, "14")] {
        let name = format!("{kind}.json");
        let (m, n) = (m.to_string(), n.to_string());
        let args = ["generate", "--kind", kind, "--m", &m, "--n", &n, "--seed", seed, "--out", &name];
        let (code, stdout) = cli_run(dir, &args);
        log.push((args.join(" "), code, stdout));
        files.push(name);
    }
    let args = ["reduce", "--from", "qap", "--input", "qap.json", "--out", "red.json"];
    let (code, stdout) = cli_run(dir, &args);
    log.push((args.join(" "), code, stdout));
    files.push("red.json".into());

    for file in &files {
        for method in ["brute", "enum-x", "rxoy", "ryox", "alt", "shift", "auto"] {
            let args = ["solve", "--method", method, "--input", file, "--json"];
            let (code, stdout) = cli_run(dir, &args);
            log.push((args.join(" "), code, stdout));
        }
        for args in [vec!["analyze", "--input", file], vec!["check-lin", "--input", file]] {
            let (code, stdout) = cli_run(dir, &args);
            log.push((args.join(" "), code, stdout));
        }
        log.push((format!("file {file}"), 0, std::fs::read(dir.join(file)).unwrap()));
    }
    log
}

fn c11_determinism() -> Verdict {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = cli_session(a.path());
    let second = cli_session(b.path());
    let failed_runs = first.iter().filter(|(_, code, _)| *code != 0).count();
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    verdict(
        failed_runs == 0 && differing.is_empty() && first.len() == second.len(),
        format!("{} outputs compared, {} differ, {failed_runs} non-zero exits {:?}", first.len(), differing.len(), differing),
    )
}

fn main() -> ExitCode {
    let insts = base_instances();
    let criteria: Vec<(&str, Check)> = vec![
        ("oracle agreement", Box::new(|| c1_oracle(&insts))),
        ("rounding guarantee", Box::new(|| c2_rounding(&insts))),
        ("average formula", Box::new(|| c3_average(&insts))),
        ("below-average constructions", Box::new(|| c4_below_average(&insts))),
        ("domination bound", Box::new(|| c5_domination(&insts))),
        ("linearizable pipeline", Box::new(c6_linearizable)),
        ("CVP pipeline", Box::new(c7_cvp)),
        ("rank-one solver", Box::new(c8_rank_one)),
        ("reductions", Box::new(c9_reductions)),
        ("alternating search", Box::new(|| c10_alternating(&insts))),
        ("CLI determinism", Box::new(c11_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        failed += !v.pass as usize;
        println!("criterion {:>2} {}: {} ({})", i + 1, if v.pass { "PASS" } else { "FAIL" }, name, v.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
