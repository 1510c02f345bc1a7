//! Repeated solver runs over generated instances, with per-run traces and an
//! aggregate table.
//!
//! Repeat `i` of an entry regenerates its instance from
//! `derive_seed(spec.seed, i)` and seeds the solver with the same value, so any
//! single run can be reproduced from the suite file alone. Runs execute one
//! after another to keep wall-clock measurements free of contention.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problems::{generate, rmse, SyntheticInstance, SyntheticSpec};
use crate::rng::derive_seed;
use crate::solver::{effective_config, solve, Algorithm, SolveTrace, SolverConfig};

/// Regularization weight: a number, `"noise_norm"` (`||E||`) or
/// `"2*noise_norm"` (`2 ||E||`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauChoice {
    Value(f64),
    Preset(String),
}

impl TauChoice {
    pub fn resolve(&self, noise_norm: f64) -> Result<f64> {
        let tau = match self {
            TauChoice::Value(v) => *v,
            TauChoice::Preset(name) => match name.replace(' ', "").as_str() {
                "noise_norm" => noise_norm,
                "2*noise_norm" => 2.0 * noise_norm,
                other => return Err(Error::InvalidConfig(format!("unknown tau preset {other:?}"))),
            },
        };
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidConfig(format!("tau resolved to {tau}, expected a positive number")));
        }
        Ok(tau)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchEntry {
    /// Row label; also the output sub-directory name.
    pub name: String,
    pub spec: SyntheticSpec,
    #[serde(default)]
    pub config: SolverConfig,
    pub algorithm: Algorithm,
    pub tau: TauChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSuite {
    pub entries: Vec<BenchEntry>,
}

impl BenchSuite {
    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::InvalidConfig("benchmark suite has no entries".into()));
        }
        for (i, e) in self.entries.iter().enumerate() {
            if e.name.is_empty() || !e.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
                return Err(Error::InvalidConfig(format!(
                    "entry {i}: name {:?} must be nonempty and use only [A-Za-z0-9._-]",
                    e.name
                )));
            }
            if self.entries[..i].iter().any(|o| o.name == e.name) {
                return Err(Error::InvalidConfig(format!("duplicate entry name {:?}", e.name)));
            }
            e.spec.validate()?;
            effective_config(e.algorithm, &e.config).validate()?;
            if let TauChoice::Preset(_) = e.tau {
                e.tau.resolve(1.0)?;
            }
        }
        Ok(())
    }
}

/// Outcome of one repeat.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub name: String,
    pub algorithm: Algorithm,
    pub repeat: usize,
    pub seed: u64,
    pub tau: f64,
    pub converged: bool,
    pub diverged: bool,
    pub iterations: usize,
    pub final_rank: usize,
    pub wall_seconds: f64,
    /// `||L - X|| / sqrt(mn)` against the planted matrix.
    pub rmse: f64,
    pub trace: SolveTrace,
}

pub const AGGREGATE_CSV_HEADER: [&str; 15] = [
    "name",
    "algorithm",
    "runs",
    "converged",
    "diverged",
    "mean_wall_s",
    "min_wall_s",
    "max_wall_s",
    "mean_iterations",
    "min_iterations",
    "max_iterations",
    "mean_final_rank",
    "min_final_rank",
    "max_final_rank",
    "mean_rmse",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub name: String,
    pub algorithm: Algorithm,
    pub runs: usize,
    pub converged: usize,
    pub diverged: usize,
    pub mean_wall_seconds: f64,
    pub min_wall_seconds: f64,
    pub max_wall_seconds: f64,
    pub mean_iterations: f64,
    pub min_iterations: usize,
    pub max_iterations: usize,
    pub mean_final_rank: f64,
    pub min_final_rank: usize,
    pub max_final_rank: usize,
    pub mean_rmse: f64,
}

impl AggregateRow {
    fn from_runs(runs: &[RunRecord]) -> AggregateRow {
        let count = runs.len() as f64;
        let mean = |f: &dyn Fn(&RunRecord) -> f64| runs.iter().map(f).sum::<f64>() / count;
        let walls = runs.iter().map(|r| r.wall_seconds);
        AggregateRow {
            name: runs[0].name.clone(),
            algorithm: runs[0].algorithm,
            runs: runs.len(),
            converged: runs.iter().filter(|r| r.converged).count(),
            diverged: runs.iter().filter(|r| r.diverged).count(),
            mean_wall_seconds: mean(&|r| r.wall_seconds),
            min_wall_seconds: walls.clone().fold(f64::INFINITY, f64::min),
            max_wall_seconds: walls.fold(0.0, f64::max),
            mean_iterations: mean(&|r| r.iterations as f64),
            min_iterations: runs.iter().map(|r| r.iterations).min().unwrap_or(0),
            max_iterations: runs.iter().map(|r| r.iterations).max().unwrap_or(0),
            mean_final_rank: mean(&|r| r.final_rank as f64),
            min_final_rank: runs.iter().map(|r| r.final_rank).min().unwrap_or(0),
            max_final_rank: runs.iter().map(|r| r.final_rank).max().unwrap_or(0),
            mean_rmse: mean(&|r| r.rmse),
        }
    }

    fn csv_fields(&self) -> Vec<String> {
        vec![
            self.name.clone(),
            self.algorithm.to_string(),
            self.runs.to_string(),
            self.converged.to_string(),
            self.diverged.to_string(),
            self.mean_wall_seconds.to_string(),
            self.min_wall_seconds.to_string(),
            self.max_wall_seconds.to_string(),
            self.mean_iterations.to_string(),
            self.min_iterations.to_string(),
            self.max_iterations.to_string(),
            self.mean_final_rank.to_string(),
            self.min_final_rank.to_string(),
            self.max_final_rank.to_string(),
            self.mean_rmse.to_string(),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub runs: Vec<RunRecord>,
    pub aggregate: Vec<AggregateRow>,
    pub warnings: Vec<String>,
}

impl BenchReport {
    pub fn row(&self, name: &str) -> Option<&AggregateRow> {
        self.aggregate.iter().find(|r| r.name == name)
    }

    pub fn write_aggregate_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(AGGREGATE_CSV_HEADER)?;
        for row in &self.aggregate {
            writer.write_record(row.csv_fields())?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Seed used for repeat `repeat` of an entry.
pub fn repeat_seed(spec: &SyntheticSpec, repeat: usize) -> u64 {
    derive_seed(spec.seed, repeat as u64)
}

/// The instance behind repeat `repeat` of an entry.
pub fn repeat_instance(entry: &BenchEntry, repeat: usize) -> Result<SyntheticInstance> {
    generate(&SyntheticSpec { seed: repeat_seed(&entry.spec, repeat), ..entry.spec.clone() })
}

fn run_one(entry: &BenchEntry, repeat: usize) -> Result<RunRecord> {
    let seed = repeat_seed(&entry.spec, repeat);
    let inst = repeat_instance(entry, repeat)?;
    let tau = entry.tau.resolve(inst.noise_norm())?;
    let problem = inst.problem(tau)?;
    let x0 = Matrix::zeros(entry.spec.m, entry.spec.n);
    let (trace, diverged) = match solve(entry.algorithm, &problem, &entry.config, &x0, seed) {
        Ok(trace) => (trace, false),
        Err(Error::Divergence { trace, .. }) => (*trace, true),
        Err(e) => return Err(e),
    };
    let rmse = if diverged { f64::NAN } else { rmse(&inst.ground_truth, &trace.x)? };
    Ok(RunRecord {
        name: entry.name.clone(),
        algorithm: entry.algorithm,
        repeat,
        seed,
        tau,
        converged: trace.converged,
        diverged,
        iterations: trace.iterations,
        final_rank: trace.final_rank(),
        wall_seconds: trace.total_seconds(),
        rmse,
        trace,
    })
}

fn write_run(dir: &Path, entry: &BenchEntry, run: &RunRecord) -> Result<()> {
    let run_dir = dir.join(&entry.name).join(format!("rep{}", run.repeat));
    fs::create_dir_all(&run_dir)?;
    run.trace.write_csv(fs::File::create(run_dir.join("trace.csv"))?)?;
    let summary = run.trace.summary(&effective_config(entry.algorithm, &entry.config), run.seed);
    let record = serde_json::json!({
        "summary": summary,
        "spec": SyntheticSpec { seed: run.seed, ..entry.spec.clone() },
        "tau": run.tau,
        "diverged": run.diverged,
        "rmse": if run.rmse.is_finite() { Some(run.rmse) } else { None },
    });
    fs::write(run_dir.join("summary.json"), serde_json::to_string_pretty(&record)?)?;
    Ok(())
}

/// Runs every entry `repeats` times. With `out_dir`, writes
/// `<name>/rep<i>/{trace.csv,summary.json}`, `aggregate.csv` and
/// `suite.json`. Diverging runs are recorded, not fatal.
pub fn run_suite(suite: &BenchSuite, repeats: usize, out_dir: Option<&Path>) -> Result<BenchReport> {
    suite.validate()?;
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be at least 1".into()));
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        let echo = serde_json::json!({ "version": crate::VERSION, "repeats": repeats, "suite": suite });
        fs::write(dir.join("suite.json"), serde_json::to_string_pretty(&echo)?)?;
    }
    let mut runs = Vec::new();
    let mut aggregate = Vec::new();
    let mut warnings = Vec::new();
    for entry in &suite.entries {
        let start = runs.len();
        for repeat in 0..repeats {
            let run = run_one(entry, repeat)?;
            if run.diverged {
                warnings.push(format!("{} repeat {repeat}: diverged after {} iterations", entry.name, run.iterations));
            } else if !run.converged {
                warnings.push(format!("{} repeat {repeat}: hit max_iter without converging", entry.name));
            }
            if let Some(dir) = out_dir {
                write_run(dir, entry, &run)?;
            }
            runs.push(run);
        }
        aggregate.push(AggregateRow::from_runs(&runs[start..]));
    }
    let report = BenchReport { runs, aggregate, warnings };
    if let Some(dir) = out_dir {
        report.write_aggregate_csv(fs::File::create(dir.join("aggregate.csv"))?)?;
    }
    Ok(report)
}
