//! `lowrank`: generate synthetic instances, run a solver on one, or sweep a
//! benchmark suite.
//!
//! Exit codes: 0 success, 2 invalid input, 3 no convergence, 4 I/O failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use lowrank_core::bench::{run_suite, BenchSuite, TauChoice};
use lowrank_core::io::{read_problem_dir, write_problem_dir};
use lowrank_core::problems::{generate, rmse, SyntheticSpec};
use lowrank_core::solver::{effective_config, solve, Algorithm, SolveTrace, TraceLevel};
use lowrank_core::{Error, Matrix, SolverConfig};

const EXIT_INVALID: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "lowrank", version, about = "SVD-free weighted low-rank recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance (CSV matrices plus manifest.json) to a directory.
    Generate(GenerateArgs),
    /// Run one solver on a generated instance; writes trace.csv and summary.json.
    Solve(SolveArgs),
    /// Run every entry of a suite several times; writes per-run traces and aggregate.csv.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// JSON instance spec.
    #[arg(long)]
    spec: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the spec seed.
    #[arg(long, env = "LOWRANK_SEED")]
    seed: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    /// Directory written by `lowrank generate`.
    problem: PathBuf,
    /// JSON run config: solver settings plus `tau` and an optional `seed`.
    #[arg(long)]
    config: PathBuf,
    /// prograamme, prograamme-rc, pgd or fista.
    #[arg(long)]
    algo: Algorithm,
    /// Output directory for trace.csv, summary.json and manifest.json.
    #[arg(long)]
    out: PathBuf,
    /// Solver seed (factor initialization); overrides the config.
    #[arg(long, env = "LOWRANK_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    trace_level: Option<TraceLevel>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON suite: `{"entries": [{name, spec, config, algorithm, tau}, ...]}`.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Overrides the seed of every entry's instance spec.
    #[arg(long, env = "LOWRANK_SEED")]
    seed: Option<u64>,
    /// Overrides the trace level of every entry.
    #[arg(long)]
    trace_level: Option<TraceLevel>,
}

/// Config file for `lowrank solve`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RunConfig {
    tau: TauChoice,
    #[serde(default)]
    seed: u64,
    #[serde(flatten)]
    solver: SolverConfig,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            Error::Csv(c) if c.is_io_error() => EXIT_IO,
            Error::Divergence { .. } => EXIT_NOT_CONVERGED,
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure { code: EXIT_INVALID, message: format!("{}: {e}", path.display()) })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    fs::write(path, text).map_err(|e| io_failure(path, e))
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), Failure> {
    let mut spec: SyntheticSpec = read_json(&args.spec)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let inst = generate(&spec)?;
    let manifest = write_problem_dir(&args.out, &inst)?;
    println!(
        "wrote {} files for a {}x{} {} instance to {}",
        manifest.files.len() + 1,
        spec.m,
        spec.n,
        manifest.operator,
        args.out.display()
    );
    Ok(())
}

fn write_trace(dir: &Path, trace: &SolveTrace) -> Result<(), Failure> {
    let path = dir.join("trace.csv");
    let file = fs::File::create(&path).map_err(|e| io_failure(&path, e))?;
    trace.write_csv(file)?;
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let mut run: RunConfig = read_json(&args.config)?;
    if let Some(seed) = args.seed {
        run.seed = seed;
    }
    if let Some(level) = args.trace_level {
        run.solver.trace = level;
    }
    let loaded = read_problem_dir(&args.problem)?;
    let tau = run.tau.resolve(loaded.noise_norm())?;
    let problem = loaded.problem(tau)?;
    let (m, n) = problem.domain_shape();
    let config = effective_config(args.algo, &run.solver);

    fs::create_dir_all(&args.out).map_err(|e| io_failure(&args.out, e))?;
    write_json(
        &args.out.join("manifest.json"),
        &serde_json::json!({
            "version": lowrank_core::VERSION,
            "problem": args.problem,
            "problem_manifest": loaded.manifest,
            "algorithm": args.algo,
            "seed": run.seed,
            "tau": tau,
            "run_config": run,
        }),
    )?;

    let (trace, diverged) = match solve(args.algo, &problem, &config, &Matrix::zeros(m, n), run.seed) {
        Ok(trace) => (trace, None),
        Err(Error::Divergence { iteration, trace }) => (*trace, Some(iteration)),
        Err(e) => return Err(e.into()),
    };
    write_trace(&args.out, &trace)?;
    let error = match &loaded.ground_truth {
        Some(truth) if diverged.is_none() => Some(rmse(truth, &trace.x)?),
        _ => None,
    };
    write_json(
        &args.out.join("summary.json"),
        &serde_json::json!({
            "summary": trace.summary(&config, run.seed),
            "tau": tau,
            "diverged_at": diverged,
            "rmse_vs_ground_truth": error,
        }),
    )?;
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(k) = diverged {
        return Err(Failure { code: EXIT_NOT_CONVERGED, message: format!("{} diverged at iteration {k}", args.algo) });
    }
    println!(
        "{}: {} after {} iterations, rank {}, {:.3} s",
        args.algo,
        if trace.converged { "converged" } else { "stopped at max_iter" },
        trace.iterations,
        trace.final_rank(),
        trace.total_seconds()
    );
    if trace.converged {
        Ok(())
    } else {
        Err(Failure { code: EXIT_NOT_CONVERGED, message: "maximum iterations reached without convergence".into() })
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    let mut suite: BenchSuite = read_json(&args.spec)?;
    for entry in &mut suite.entries {
        if let Some(seed) = args.seed {
            entry.spec.seed = seed;
        }
        if let Some(level) = args.trace_level {
            entry.config.trace = level;
        }
    }
    let report = run_suite(&suite, args.repeats, Some(&args.out))?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for row in &report.aggregate {
        println!(
            "{:<20} {:<14} runs {} converged {} mean {:.3} s, {:.0} iterations, rank {}..{}",
            row.name,
            row.algorithm.to_string(),
            row.runs,
            row.converged,
            row.mean_wall_seconds,
            row.mean_iterations,
            row.min_final_rank,
            row.max_final_rank
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
