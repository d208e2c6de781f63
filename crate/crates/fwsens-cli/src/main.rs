//! Command-line front end: solve polytope-constrained quadratics, bound the
//! optimal value under right-hand-side changes, sweep a constraint row, and
//! audit the claimed bounds against exhaustive enumeration.
//!
//! Exit codes: 0 success, 1 input error, 2 iteration cap hit, 3 sensitivity
//! flag failed (bounds partially unverified), 4 instance too large for the
//! enumeration oracle, 5 audit found a violated bound.

mod problem;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use fwsens::{
    analyze, default_start, delta_grid, run_fw, sandwich_audit, shrink_delta_until_flags,
    sweep_row, Error, FwConfig, FwIteration, FwResult, SweepPoint, WeightedVertex,
    DEFAULT_FEASIBILITY_TOL,
};
use serde::Serialize;

use problem::Problem;

const EXIT_INPUT: u8 = 1;
const EXIT_ITERATION_CAP: u8 = 2;
const EXIT_FLAG_FAILED: u8 = 3;
const EXIT_SIZE_GUARD: u8 = 4;
const EXIT_AUDIT_FAILED: u8 = 5;

#[derive(Parser)]
#[command(name = "fwsens", version, about = "Frank-Wolfe solves and sensitivity bounds over polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize the objective over the polytope and report the run.
    Solve(SolveArgs),
    /// Bound the optimal value after replacing b with b-prime.
    Sensitivity(SensitivityArgs),
    /// Tabulate the bounds while one row of b moves over a delta grid.
    Sweep(SweepArgs),
    /// Audit every claimed bound against exhaustive enumeration.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Problem description in JSON.
    problem: PathBuf,
    /// Stop once the duality gap certificate is at most this value.
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    /// Iteration cap (must be at least 1).
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Write a per-iteration CSV (iteration, f, gap, lower_bound) here.
    #[arg(long, value_name = "CSV")]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SensitivityArgs {
    /// Problem description in JSON.
    problem: PathBuf,
    /// Perturbed right-hand side: an inline JSON array or a path to one.
    #[arg(long = "b-prime", value_name = "JSON|PATH")]
    b_prime: String,
    /// Analysis point: "from-solve" runs the solver first; otherwise an
    /// inline JSON array or a path to one.
    #[arg(long, default_value = "from-solve", value_name = "from-solve|JSON|PATH")]
    x: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Problem description in JSON.
    problem: PathBuf,
    /// Row of b to perturb, 1-based.
    #[arg(long)]
    row: usize,
    /// Smallest delta added to the selected row.
    #[arg(long, allow_negative_numbers = true)]
    delta_min: f64,
    /// Largest delta added to the selected row.
    #[arg(long, allow_negative_numbers = true)]
    delta_max: f64,
    /// Number of evenly spaced grid points (at least 2).
    #[arg(long)]
    steps: usize,
    /// Output CSV path.
    #[arg(long, value_name = "CSV")]
    out: PathBuf,
    /// Analysis point, as for the sensitivity command.
    #[arg(long, default_value = "from-solve", value_name = "from-solve|JSON|PATH")]
    x: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Problem description in JSON.
    problem: PathBuf,
    /// Perturbed right-hand side: an inline JSON array or a path to one.
    #[arg(long = "b-prime", value_name = "JSON|PATH")]
    b_prime: String,
    /// Analysis point, as for the sensitivity command.
    #[arg(long, default_value = "from-solve", value_name = "from-solve|JSON|PATH")]
    x: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_INPUT,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sensitivity(args) => cmd_sensitivity(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

/// Report printed by the solve command.
#[derive(Serialize)]
struct SolveReport<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
    x: &'a [f64],
    f_value: f64,
    fw_gap: f64,
    lower_bound: f64,
    best_lower_bound: f64,
    iterations: usize,
    converged: bool,
    decomposition: &'a [WeightedVertex<f64>],
    /// Prices from the last oracle call, one per constraint row.
    dual_prices: &'a [f64],
}

fn cmd_solve(args: SolveArgs) -> Result<u8, String> {
    let problem = problem::load(&args.problem)?;
    let result = solve_problem(&problem, args.epsilon, args.max_iter, args.trace.is_some())?;
    if let Some(path) = &args.trace {
        write_trace(path, result.trace.as_deref().unwrap_or(&[]))?;
    }
    print_json(&SolveReport {
        name: problem.name.as_deref(),
        x: &result.x,
        f_value: result.f_value,
        fw_gap: result.fw_gap,
        lower_bound: result.lower_bound,
        best_lower_bound: result.best_lower_bound,
        iterations: result.iterations,
        converged: result.converged,
        decomposition: &result.decomposition,
        dual_prices: &result.last_pair.dual_prices,
    })?;
    Ok(if result.converged { 0 } else { EXIT_ITERATION_CAP })
}

fn cmd_sensitivity(args: SensitivityArgs) -> Result<u8, String> {
    let problem = problem::load(&args.problem)?;
    let b_prime = problem::vector_arg("b-prime", &args.b_prime)?;
    let x = resolve_x(&problem, &args.x)?;
    let report = analyze(&problem.f, &problem.p, &b_prime, &x, DEFAULT_FEASIBILITY_TOL)
        .map_err(|e| e.to_string())?;
    print_json(&report)?;
    Ok(if report.common_dual && report.x_prime_feasible {
        0
    } else {
        EXIT_FLAG_FAILED
    })
}

/// Summary printed by the sweep command after the CSV is written.
#[derive(Serialize)]
struct SweepSummary {
    row: usize,
    delta_min: f64,
    delta_max: f64,
    rows_written: usize,
    out: String,
    /// Largest |delta| at which both verification flags still held, found by
    /// halving inward from each sweep endpoint; null when none survived.
    largest_abs_delta_with_both_flags: Option<f64>,
    note: String,
}

fn cmd_sweep(args: SweepArgs) -> Result<u8, String> {
    let problem = problem::load(&args.problem)?;
    let m = problem.p.num_constraints();
    if args.row == 0 || args.row > m {
        return Err(format!("--row must be between 1 and {m} (1-based), got {}", args.row));
    }
    let row = args.row - 1;
    let x = resolve_x(&problem, &args.x)?;
    let deltas = delta_grid(args.delta_min, args.delta_max, args.steps).map_err(|e| e.to_string())?;
    let points = sweep_row(&problem.f, &problem.p, &x, row, &deltas, DEFAULT_FEASIBILITY_TOL)
        .map_err(|e| e.to_string())?;
    write_sweep_csv(&args.out, &points)?;

    let largest = bisect_flag_frontier(&problem, &x, row, args.delta_min, args.delta_max)?;
    let note = match largest {
        Some(d) => format!(
            "both flags hold at delta = {}; found by halving inward from the sweep endpoints",
            fmt(d)
        ),
        None => "no tested delta kept both flags while halving inward from the sweep endpoints"
            .to_string(),
    };
    print_json(&SweepSummary {
        row: args.row,
        delta_min: args.delta_min,
        delta_max: args.delta_max,
        rows_written: points.len(),
        out: args.out.display().to_string(),
        largest_abs_delta_with_both_flags: largest.map(f64::abs),
        note,
    })?;
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, String> {
    let problem = problem::load(&args.problem)?;
    let b_prime = problem::vector_arg("b-prime", &args.b_prime)?;
    let x = resolve_x(&problem, &args.x)?;
    match sandwich_audit(&problem.f, &problem.p, &b_prime, &x, DEFAULT_FEASIBILITY_TOL) {
        Ok(audit) => {
            print_json(&audit)?;
            Ok(if audit.pass { 0 } else { EXIT_AUDIT_FAILED })
        }
        Err(err @ Error::SizeGuard { .. }) => {
            eprintln!("error: {err}");
            Ok(EXIT_SIZE_GUARD)
        }
        Err(err) => Err(err.to_string()),
    }
}

fn solve_problem(
    problem: &Problem,
    epsilon: f64,
    max_iter: usize,
    record_trace: bool,
) -> Result<FwResult<f64>, String> {
    let cfg = FwConfig::new(max_iter, epsilon)
        .map_err(|e| e.to_string())?
        .with_trace(record_trace);
    let x0 = match &problem.x0 {
        Some(x0) => x0.clone(),
        None => default_start(&problem.p).map_err(|e| e.to_string())?,
    };
    run_fw(&problem.f, &problem.p, &x0, &cfg).map_err(|e| e.to_string())
}

/// Resolves the `--x` flag: a fresh solve, or an explicit vector.
fn resolve_x(problem: &Problem, raw: &str) -> Result<Vec<f64>, String> {
    if raw == "from-solve" {
        Ok(solve_problem(problem, 1e-8, 10_000, false)?.x)
    } else {
        problem::vector_arg("x", raw)
    }
}

/// Halves inward from each sweep endpoint until both verification flags hold,
/// and returns the surviving delta of largest magnitude.
fn bisect_flag_frontier(
    problem: &Problem,
    x: &[f64],
    row: usize,
    delta_min: f64,
    delta_max: f64,
) -> Result<Option<f64>, String> {
    let span = delta_min.abs().max(delta_max.abs());
    if span == 0.0 {
        return Ok(None);
    }
    let min_abs = span / 1024.0;
    let mut best: Option<f64> = None;
    for endpoint in [delta_min, delta_max] {
        let hit = shrink_delta_until_flags(
            &problem.f,
            &problem.p,
            x,
            row,
            endpoint,
            DEFAULT_FEASIBILITY_TOL,
            min_abs,
        )
        .map_err(|e| e.to_string())?;
        if let Some((delta, _)) = hit {
            if best.is_none_or(|b| delta.abs() > b.abs()) {
                best = Some(delta);
            }
        }
    }
    Ok(best)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    println!("{text}");
    Ok(())
}

/// Shortest decimal string that parses back to exactly the same value.
fn fmt(x: f64) -> String {
    x.to_string()
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn write_trace(path: &Path, trace: &[FwIteration<f64>]) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let io = |e: csv::Error| format!("{}: {e}", path.display());
    w.write_record(["iteration", "f", "gap", "lower_bound"]).map_err(io)?;
    for rec in trace {
        w.write_record([
            rec.iteration.to_string(),
            fmt(rec.f_value),
            fmt(rec.gap),
            fmt(rec.best_lower_bound),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| format!("{}: {e}", path.display()))
}

fn write_sweep_csv(path: &Path, points: &[SweepPoint<f64>]) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let io = |e: csv::Error| format!("{}: {e}", path.display());
    w.write_record([
        "delta",
        "gap",
        "lambda_i",
        "predicted_change",
        "eq3_lower",
        "eq3_upper",
        "exact_fstar",
        "common_dual",
        "x_prime_feasible",
    ])
    .map_err(io)?;
    for pt in points {
        w.write_record([
            fmt(pt.delta),
            fmt(pt.gap),
            fmt(pt.lambda_row),
            fmt(pt.predicted_change),
            fmt_opt(pt.eq3_lower),
            fmt_opt(pt.eq3_upper),
            fmt_opt(pt.exact_f_star),
            pt.common_dual.to_string(),
            pt.x_prime_feasible.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| format!("{}: {e}", path.display()))
}
