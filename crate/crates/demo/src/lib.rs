//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes plain numbers and returns a JSON string, so the page
//! needs no generated TypeScript types. The same functions run natively,
//! which is how they are tested.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use lowrank_core::amfit::{inner_solve, FactorPair, InnerPolicy, InnerStop};
use lowrank_core::linalg::singular_values;
use lowrank_core::problems::{generate, rmse, NoiseModel, SyntheticSpec, WeightModel};
use lowrank_core::prox::svt_with_rank;
use lowrank_core::rng::{gaussian_matrix, seeded, Stream};
use lowrank_core::solver::{solve, Algorithm, InertialRule, SolverConfig, StopRule};
use lowrank_core::{Error, Matrix};

type DemoResult<T> = std::result::Result<T, String>;

fn to_json<T: Serialize>(value: &DemoResult<T>) -> String {
    match value {
        Ok(v) => serde_json::to_string(v).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}")),
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn check_size(name: &str, value: usize, max: usize) -> DemoResult<()> {
    if value == 0 || value > max {
        Err(format!("{name} must be between 1 and {max}, got {value}"))
    } else {
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct PassError {
    pub pass: usize,
    /// `||U V - svt(Z, mu)|| / max(||Z||, 1)`
    pub error: f64,
}

#[derive(Debug, Serialize)]
pub struct SvtComparison {
    pub singular_values: Vec<f64>,
    pub mu: f64,
    pub svt_rank: usize,
    pub factor_rank: usize,
    pub history: Vec<PassError>,
    pub final_error: f64,
}

/// Alternating ridge passes on a random `size x size` matrix against the
/// exact SVT, recording the error after every pass.
pub fn compare_svt(size: usize, mu: f64, passes: usize, seed: u64) -> DemoResult<SvtComparison> {
    check_size("size", size, 80)?;
    check_size("passes", passes, 500)?;
    if !(mu > 0.0) {
        return Err(format!("mu must be positive, got {mu}"));
    }
    let z = gaussian_matrix(&mut seeded(seed, Stream::Truth), size, size);
    let target = svt_with_rank(&z, mu).map_err(err)?;
    let scale = z.frobenius_norm().max(1.0);
    let factor_rank = (target.rank + 2).min(size);
    let mut pair = FactorPair::random(size, size, factor_rank, &mut seeded(seed, Stream::Solver));
    let mut history = Vec::with_capacity(passes);
    for pass in 1..=passes {
        let out = inner_solve(&z, mu, pair, InnerStop::Passes(1)).map_err(err)?;
        history.push(PassError { pass, error: (&out.product - &target.matrix).frobenius_norm() / scale });
        pair = out.pair;
    }
    Ok(SvtComparison {
        singular_values: singular_values(&z).map_err(err)?,
        mu,
        svt_rank: target.rank,
        factor_rank,
        final_error: history.last().map_or(f64::NAN, |h| h.error),
        history,
    })
}

#[derive(Debug, Serialize)]
pub struct RankTrace {
    pub algorithm: String,
    pub iterations: usize,
    pub converged: bool,
    pub rank_x: Vec<usize>,
    pub factor_rank: Vec<usize>,
    pub step_norm: Vec<f64>,
    pub seconds: f64,
    pub rmse: f64,
}

#[derive(Debug, Serialize)]
pub struct RankTraces {
    pub planted_rank: usize,
    pub tau: f64,
    pub runs: Vec<RankTrace>,
}

fn completion_spec(size: usize, rank: usize, observed: f64, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        m: size,
        n: size,
        rank,
        noise: NoiseModel::AdditiveGaussian { sigma: 0.1 },
        weights: WeightModel::AllOnes,
        mask: Some(observed),
        exact_mask_count: false,
        sensing_rows: None,
        seed,
    }
}

/// Rank of the iterate per iteration for ProGrAMMe with rank continuation
/// and for proximal gradient with exact SVTs, on a random completion problem
/// with `tau = ||E||`.
pub fn rank_traces(size: usize, rank: usize, observed: f64, seed: u64) -> DemoResult<RankTraces> {
    check_size("size", size, 150)?;
    let inst = generate(&completion_spec(size, rank, observed, seed)).map_err(err)?;
    let tau = inst.noise_norm();
    let problem = inst.problem(tau).map_err(err)?;
    let mut cfg = SolverConfig {
        rank: (size / 2).max(1),
        inner: InnerPolicy::Fixed { passes: 1 },
        stop: StopRule { step_tol: 1e-6, relative: true, max_iter: 2000 },
        ..SolverConfig::default()
    };
    cfg.continuation.burn_in = 10;
    cfg.continuation.cadence = 5;
    let mut runs = Vec::new();
    for algorithm in [Algorithm::PrograammeRc, Algorithm::Pgd] {
        let trace = solve(algorithm, &problem, &cfg, &Matrix::zeros(size, size), seed).map_err(err)?;
        runs.push(RankTrace {
            algorithm: algorithm.to_string(),
            iterations: trace.iterations,
            converged: trace.converged,
            rank_x: trace.rank_trace(),
            factor_rank: trace.records.iter().map(|r| r.r).collect(),
            step_norm: trace.records.iter().map(|r| r.step_norm).collect(),
            seconds: trace.total_seconds(),
            rmse: rmse(&inst.ground_truth, &trace.x).map_err(err)?,
        });
    }
    Ok(RankTraces { planted_rank: rank, tau, runs })
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub rule: String,
    pub iterations: usize,
    pub converged: bool,
    pub final_rank: usize,
    pub seconds: f64,
    pub step_norm: Vec<f64>,
}

/// ProGrAMMe iterations for `a_k` in {0, 1/4, 1/2, 3/4, (k-1)/(k+20)}.
pub fn inertial_sweep(size: usize, rank: usize, seed: u64) -> DemoResult<Vec<SweepRow>> {
    check_size("size", size, 150)?;
    let inst = generate(&completion_spec(size, rank, 0.5, seed)).map_err(err)?;
    let problem = inst.problem(inst.noise_norm()).map_err(err)?;
    let rules = [
        InertialRule::Zero,
        InertialRule::Constant { a: 0.25 },
        InertialRule::Constant { a: 0.5 },
        InertialRule::Constant { a: 0.75 },
        InertialRule::FistaLike { d: 20.0 },
    ];
    rules
        .into_iter()
        .map(|rule| {
            let cfg = SolverConfig {
                rule,
                rank: (3 * rank).min(size),
                inner: InnerPolicy::EPSILON_DEFAULT,
                stop: StopRule { step_tol: 1e-6, relative: true, max_iter: 3000 },
                ..SolverConfig::default()
            };
            let trace = solve(Algorithm::Prograamme, &problem, &cfg, &Matrix::zeros(size, size), seed).map_err(err)?;
            Ok(SweepRow {
                rule: rule.describe(),
                iterations: trace.iterations,
                converged: trace.converged,
                final_rank: trace.final_rank(),
                seconds: trace.total_seconds(),
                step_norm: trace.records.iter().map(|r| r.step_norm).collect(),
            })
        })
        .collect()
}

#[wasm_bindgen(js_name = compareSvt)]
pub fn compare_svt_json(size: usize, mu: f64, passes: usize, seed: u32) -> String {
    to_json(&compare_svt(size, mu, passes, seed as u64))
}

#[wasm_bindgen(js_name = rankTraces)]
pub fn rank_traces_json(size: usize, rank: usize, observed: f64, seed: u32) -> String {
    to_json(&rank_traces(size, rank, observed, seed as u64))
}

#[wasm_bindgen(js_name = inertialSweep)]
pub fn inertial_sweep_json(size: usize, rank: usize, seed: u32) -> String {
    to_json(&inertial_sweep(size, rank, seed as u64))
}

#[wasm_bindgen]
pub fn version() -> String {
    lowrank_core::VERSION.to_string()
}
