//! The `bap` command line: solve, analyze, check-lin, generate and reduce.
//!
//! Exit codes: 0 on success, 2 for bad input or usage, 3 when an
//! enumeration would exceed the cap (`BAP_ENUM_CAP`, default 10^7).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bap::analysis::{domination_count, domination_lower_bound, value_profile};
use bap::auto::solve_auto;
use bap::exact::{brute_force, solve_by_x_enumeration};
use bap::generate::{generate, GeneratorSpec, Kind, SumSide};
use bap::heuristics::{
    alternating_search, average_value, best_shift, round_x_optimize_y, round_y_optimize_x, uniform_fractional,
    DEFAULT_MAX_ROUNDS,
};
use bap::io::{parse_instance, parse_matchings, parse_qap, parse_tap, write_instance, InstanceFile, Metadata};
use bap::reductions::{default_penalty, disjoint_matchings_to_bap, qap_penalty_reduction, tap_to_bap};
use bap::structure::check_linearizable;
use bap::{evaluate, Assignment, BapError, EnumCap, Instance};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bap", version, about = "Bilinear assignment problem toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    EnumX,
    Rxoy,
    Ryox,
    Alt,
    Shift,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Qap,
    Tap,
    DisjointMatchings,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance file.
    Solve {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        input: PathBuf,
        /// Print a JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive statistics of an instance.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Closed-form average objective value.
        #[arg(long)]
        average: bool,
        /// Count of solutions no better than average, with the guaranteed bound.
        #[arg(long)]
        domination: bool,
        /// Mean, median, min and max over all solutions.
        #[arg(long)]
        profile: bool,
    },
    /// Decide whether Q is linearizable.
    CheckLin {
        #[arg(long)]
        input: PathBuf,
        /// Residual tolerance (default 1e-7 * (1 + max|q|)).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Write a seeded random instance.
    Generate {
        #[arg(long)]
        kind: Kind,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        lo: i64,
        #[arg(long, default_value_t = 99, allow_negative_numbers = true)]
        hi: i64,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, default_value = "d")]
        sum_side: SumSide,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        zero_one: bool,
    },
    /// Turn a QAP, 3AP or DISJOINT MATCHINGS input into an instance file.
    Reduce {
        #[arg(long, value_enum)]
        from: Source,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// QAP penalty (default 1 + sum |q'|).
        #[arg(long)]
        penalty: Option<f64>,
        #[arg(long)]
        zero_one: bool,
    },
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct SolveReport {
    method: &'static str,
    value: f64,
    x_perm: Vec<usize>,
    y_perm: Vec<usize>,
    certificates: Value,
}

enum Failure {
    Bap(BapError),
    Io(PathBuf, std::io::Error),
}

impl From<BapError> for Failure {
    fn from(e: BapError) -> Self {
        Failure::Bap(e)
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load(path: &Path) -> Result<(InstanceFile, Instance), Failure> {
    let file = parse_instance(&read(path)?)?;
    let inst = file.to_instance()?;
    Ok((file, inst))
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Brute => "brute",
        Method::EnumX => "enum-x",
        Method::Rxoy => "rxoy",
        Method::Ryox => "ryox",
        Method::Alt => "alt",
        Method::Shift => "shift",
        Method::Auto => "auto",
    }
}

fn solve(method: Method, path: &Path, cap: EnumCap) -> Result<SolveReport, Failure> {
    let (file, inst) = load(path)?;
    let (m, n) = (inst.m(), inst.n());
    let mut certificates = Value::Null;
    let sol: Assignment = match method {
        Method::Brute => brute_force(&inst, cap)?.0,
        Method::EnumX => solve_by_x_enumeration(&inst, cap)?.0,
        Method::Rxoy => round_x_optimize_y(&inst, &uniform_fractional(m, n))?,
        Method::Ryox => round_y_optimize_x(&inst, &uniform_fractional(m, n))?,
        Method::Shift => best_shift(&inst).0,
        Method::Alt => {
            let out = alternating_search(&inst, &Assignment::identity(m, n), DEFAULT_MAX_ROUNDS)?;
            certificates = json!({ "trace": out.trace, "rounds": out.rounds, "converged": out.converged });
            out.assignment
        }
        Method::Auto => {
            let factored = file.factored()?.map(|f| if inst.swapped() { f.swap_sides() } else { f });
            let out = solve_auto(&inst, factored.as_ref(), cap)?;
            certificates = json!({ "path": out.path, "exact": out.path.exact(), "detail": out.certificates });
            out.assignment
        }
    };
    let value = evaluate(&inst, &sol)?.total;
    let caller = inst.to_caller(&sol);
    Ok(SolveReport {
        method: method_name(method),
        value,
        x_perm: caller.x().to_vec(),
        y_perm: caller.y().to_vec(),
        certificates,
    })
}

fn list(p: &[usize]) -> String {
    let items: Vec<String> = p.iter().map(usize::to_string).collect();
    format!("[{}]", items.join(", "))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let cap = EnumCap::from_env();
    let io = |e: std::io::Error| Failure::Io(PathBuf::from("<stdout>"), e);
    match cli.command {
        Command::Solve { method, input, json } => {
            let report = solve(method, &input, cap)?;
            if json {
                let text = serde_json::to_string(&report).expect("report serializes");
                writeln!(out, "{text}").map_err(io)?;
            } else {
                writeln!(out, "method: {}", report.method).map_err(io)?;
                writeln!(out, "value: {}", report.value).map_err(io)?;
                writeln!(out, "x: {}", list(&report.x_perm)).map_err(io)?;
                writeln!(out, "y: {}", list(&report.y_perm)).map_err(io)?;
            }
        }
        Command::Analyze { input, average, domination, profile } => {
            let (_, inst) = load(&input)?;
            let all = !(average || domination || profile);
            if average || all {
                writeln!(out, "{}", average_value(&inst)).map_err(io)?;
            }
            if domination || all {
                let count = domination_count(&inst, cap)?;
                let bound = domination_lower_bound(inst.m(), inst.n());
                writeln!(out, "domination: {count} (guaranteed {bound})").map_err(io)?;
            }
            if profile || all {
                let p = value_profile(&inst, cap)?;
                writeln!(out, "mean: {}", p.mean).map_err(io)?;
                writeln!(out, "median: {}", p.median).map_err(io)?;
                writeln!(out, "min: {}", p.min).map_err(io)?;
                writeln!(out, "max: {}", p.max).map_err(io)?;
            }
        }
        Command::CheckLin { input, tol } => {
            let (_, inst) = load(&input)?;
            if let Some(t) = tol {
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(BapError::InvalidArgument(format!("tolerance must be non-negative, got {t}")).into());
                }
            }
            match check_linearizable(inst.q(), tol) {
                Some(dec) => writeln!(out, "linearizable (residual {:e})", dec.max_residual(inst.q())),
                None => writeln!(out, "not linearizable"),
            }
            .map_err(io)?;
        }
        Command::Generate { kind, m, n, seed, out: path, lo, hi, rank, sum_side, alpha, density, zero_one } => {
            let spec = GeneratorSpec { kind, m, n, seed, lo, hi, rank, sum_side, alpha, density, zero_one };
            write(&path, &write_instance(&generate(&spec)?))?;
        }
        Command::Reduce { from, input, out: path, alpha, penalty, zero_one } => {
            let bytes = read(&input)?;
            let (inst, params) = match from {
                Source::Qap => {
                    let qp = parse_qap(&bytes)?;
                    let penalty = penalty.unwrap_or_else(|| default_penalty(&qp));
                    (qap_penalty_reduction(&qp, penalty)?, json!({ "penalty": penalty }))
                }
                Source::Tap => {
                    let t = parse_tap(&bytes)?;
                    (tap_to_bap(t.n, &t.a)?, Value::Null)
                }
                Source::DisjointMatchings => {
                    let f = parse_matchings(&bytes)?;
                    let inst = disjoint_matchings_to_bap(f.n, &f.e1, &f.e2, alpha, zero_one)?;
                    (inst, json!({ "alpha": alpha, "zero_one": zero_one }))
                }
            };
            let md = Metadata {
                kind: Some(format!("reduce-{}", from.to_possible_value().expect("named").get_name())),
                params: (!params.is_null()).then_some(params),
                ..Metadata::default()
            };
            write(&path, &write_instance(&InstanceFile::from_instance(&inst, Some(md))))?;
        }
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Bap(e)) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, BapError::CapExceeded { .. }) { EXIT_CAP } else { EXIT_INPUT }
        }
        Err(Failure::Io(path, e)) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            EXIT_INPUT
        }
    }
}
