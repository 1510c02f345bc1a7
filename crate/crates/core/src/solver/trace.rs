use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::{Algorithm, InertialRule, SolverConfig};
use crate::error::Result;
use crate::linalg::Matrix;

pub const TRACE_CSV_HEADER: [&str; 7] = ["k", "elapsed_s", "objective", "step_norm", "rank_x", "r", "inner_iters"];

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based iteration index; the record describes `X_k`.
    pub k: usize,
    /// Solver time only; diagnostics are excluded.
    pub elapsed_seconds: f64,
    /// Present at `TraceLevel::Full`.
    pub objective: Option<f64>,
    /// `||X_k - X_{k-1}||`
    pub step_norm: f64,
    pub rank_x: usize,
    /// Factor rank in use when `X_k` was produced.
    pub r: usize,
    pub inner_iters: usize,
    /// Inertial weight used for this iteration.
    pub inertial: f64,
    /// `rank(svt(Z, tau*gamma))` when the exact-prox probe is on.
    pub probe_rank: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SolveTrace {
    pub algorithm: Algorithm,
    pub records: Vec<IterationRecord>,
    pub x: Matrix,
    pub converged: bool,
    pub iterations: usize,
    pub gamma: f64,
    pub lipschitz: f64,
    pub tau: f64,
    pub rule: InertialRule,
    pub warnings: Vec<String>,
}

impl SolveTrace {
    pub fn final_rank(&self) -> usize {
        self.records.last().map_or(0, |r| r.rank_x)
    }

    pub fn total_seconds(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.elapsed_seconds)
    }

    pub fn rank_trace(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.rank_x).collect()
    }

    pub fn objective_trace(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.objective).collect()
    }

    /// First index `k` from which `rank_x` never changes again.
    pub fn rank_settled_at(&self) -> Option<usize> {
        let last = self.records.last()?.rank_x;
        let pos = self.records.iter().rposition(|r| r.rank_x != last);
        Some(match pos {
            Some(i) => self.records[i + 1].k,
            None => self.records[0].k,
        })
    }

    /// Trace rows without the timing column, for bitwise comparisons.
    pub fn timing_free_rows(&self) -> Vec<(usize, Option<u64>, u64, usize, usize, usize)> {
        self.records
            .iter()
            .map(|r| (r.k, r.objective.map(f64::to_bits), r.step_norm.to_bits(), r.rank_x, r.r, r.inner_iters))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(TRACE_CSV_HEADER)?;
        for rec in &self.records {
            writer.write_record([
                rec.k.to_string(),
                rec.elapsed_seconds.to_string(),
                rec.objective.map(|v| v.to_string()).unwrap_or_default(),
                rec.step_norm.to_string(),
                rec.rank_x.to_string(),
                rec.r.to_string(),
                rec.inner_iters.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn summary(&self, config: &SolverConfig, seed: u64) -> RunSummary {
        RunSummary {
            algorithm: self.algorithm,
            config: config.clone(),
            seed,
            converged: self.converged,
            iterations: self.iterations,
            final_rank: self.final_rank(),
            total_seconds: self.total_seconds(),
            gamma: self.gamma,
            lipschitz: self.lipschitz,
            tau: self.tau,
            inertial: self.rule.describe(),
            warnings: self.warnings.clone(),
            version: crate::VERSION.to_string(),
        }
    }
}

/// JSON run summary written next to every trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub algorithm: Algorithm,
    pub config: SolverConfig,
    pub seed: u64,
    pub converged: bool,
    pub iterations: usize,
    pub final_rank: usize,
    pub total_seconds: f64,
    pub gamma: f64,
    pub lipschitz: f64,
    pub tau: f64,
    pub inertial: String,
    pub warnings: Vec<String>,
    pub version: String,
}

/// Empirical check of `sum_k a_k ||X_k - X_{k-1}||^2 < inf`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub total: f64,
    /// Set when the late terms are not shrinking relative to the early ones.
    pub suspicious_growth: bool,
}

pub fn check_convergence_conditions(trace: &SolveTrace, rule: &InertialRule) -> ConvergenceReport {
    let mut terms = Vec::with_capacity(trace.records.len());
    let mut prev_step = 0.0;
    for rec in &trace.records {
        let a = rule.value(rec.k, prev_step);
        terms.push(a * prev_step * prev_step);
        prev_step = rec.step_norm;
    }
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let total = partial_sums.last().copied().unwrap_or(0.0);
    let third = terms.len() / 3;
    let suspicious_growth = third >= 3 && {
        let early: f64 = terms[..third].iter().sum::<f64>() / third as f64;
        let late: f64 = terms[terms.len() - third..].iter().sum::<f64>() / third as f64;
        late > 0.0 && late >= early
    };
    ConvergenceReport { terms, partial_sums, total, suspicious_growth }
}
