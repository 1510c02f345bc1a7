//! Outer loops.
//!
//! Both solvers run the same inertial forward step
//!
//! ```text
//! Y_k = X_k + a_k (X_k - X_{k-1})
//! Z_k = Y_k - gamma * grad f(Y_k)
//! ```
//!
//! and differ in how they take the nuclear-norm prox of `Z_k`:
//! [`prograamme_solve`] warm-starts a factor pair and runs alternating ridge
//! solves ([`crate::amfit`]), while [`pgd_solve`] applies the exact SVT.
//! With continuation enabled, the factor rank is periodically reset to
//! `rank(U)` and the factors are truncated to match.

mod config;
mod trace;

pub use config::{inertial_value, Algorithm, Continuation, InertialRule, SolverConfig, StopRule, TraceLevel};
pub use trace::{check_convergence_conditions, ConvergenceReport, IterationRecord, RunSummary, SolveTrace, TRACE_CSV_HEADER};

use web_time::{Duration, Instant};

use crate::amfit::{inner_solve, FactorPair};
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, rank_from_values, thin_qr, thin_svd, Matrix, ThinSvd};
use crate::operators::Problem;
use crate::prox::svt_with_rank;
use crate::rng::{seeded, SeededRng, Stream};

/// Accumulates solver time; diagnostics run with the clock paused.
#[derive(Debug)]
struct Stopwatch {
    total: Duration,
    started: Option<Instant>,
    last_reported: f64,
}

impl Stopwatch {
    fn new() -> Self {
        Stopwatch { total: Duration::ZERO, started: None, last_reported: 0.0 }
    }

    fn resume(&mut self) {
        if self.started.is_none() {
            self.started = Some(Instant::now());
        }
    }

    fn pause(&mut self) {
        if let Some(t) = self.started.take() {
            self.total += t.elapsed();
        }
    }

    /// Strictly increasing reading, even on coarse clocks.
    fn report(&mut self) -> f64 {
        let now = self.total.as_secs_f64().max(self.last_reported + 1e-9);
        self.last_reported = now;
        now
    }
}

/// SVD of `U V` through thin QR factors of `U` and `V^T`, so only an
/// `r x r` core is decomposed.
pub fn product_svd(u: &Matrix, v: &Matrix) -> Result<ThinSvd> {
    let (m, r) = u.shape();
    let n = v.cols();
    if r > m || r > n {
        return thin_svd(&u.matmul(v)?);
    }
    let (qu, ru) = thin_qr(u)?;
    let (qv, rv) = thin_qr(&v.transpose())?;
    let core = thin_svd(&ru.matmul_nt(&rv)?)?;
    Ok(ThinSvd { left: qu.matmul(&core.left)?, values: core.values, right: qv.matmul(&core.right)? })
}

#[derive(Debug, Clone)]
pub struct Truncated {
    pub pair: FactorPair,
    /// The requested rank was 0 and has been raised to 1.
    pub clamped: bool,
}

/// Best rank-`new_r` refactorization of `U V`, balanced as
/// `U' = P sqrt(S)`, `V' = sqrt(S) Q^T`.
pub fn truncate_factors(u: &Matrix, v: &Matrix, new_r: usize) -> Result<Truncated> {
    let r = u.cols();
    if new_r > r {
        return Err(Error::InvalidArgument(format!("cannot truncate rank {r} factors to {new_r}")));
    }
    let clamped = new_r == 0;
    let keep = new_r.max(1);
    let svd = product_svd(u, v)?;
    let keep = keep.min(svd.values.len());
    let roots: Vec<f64> = svd.values[..keep].iter().map(|s| s.sqrt()).collect();
    let new_u = Matrix::from_fn(u.rows(), keep, |i, j| svd.left.get(i, j) * roots[j]);
    let new_v = Matrix::from_fn(keep, v.cols(), |i, j| roots[i] * svd.right.get(j, i));
    Ok(Truncated { pair: FactorPair::new(new_u, new_v)?, clamped })
}

struct ProxOutput {
    x: Matrix,
    rank_x: usize,
    r: usize,
    inner_iters: usize,
}

trait ProxStep {
    fn step(&mut self, z: &Matrix, mu: f64, k: usize, clock: &mut Stopwatch) -> Result<ProxOutput>;
}

struct Factorized<'a> {
    cfg: &'a SolverConfig,
    pair: FactorPair,
    rng: SeededRng,
    warnings: Vec<String>,
}

impl ProxStep for Factorized<'_> {
    fn step(&mut self, z: &Matrix, mu: f64, k: usize, clock: &mut Stopwatch) -> Result<ProxOutput> {
        let (m, n) = z.shape();
        let r = self.pair.rank();
        let start = if self.pair.is_zero() {
            self.warnings.push(format!("iteration {k}: factors collapsed to zero, restarted from random"));
            FactorPair::random(m, n, r, &mut self.rng)
        } else {
            self.pair.clone()
        };
        let inner = inner_solve(z, mu, start, self.cfg.inner.at_iteration(k - 1))?;
        self.pair = inner.pair;

        clock.pause();
        let tol = self.cfg.continuation.rank_tol;
        let rank_x = if inner.product.all_finite() {
            rank_from_values(&product_svd(self.pair.u(), self.pair.v())?.values, tol)
        } else {
            0
        };
        clock.resume();

        let cont = &self.cfg.continuation;
        if cont.enabled && k > cont.burn_in && (k - cont.burn_in) % cont.cadence == 0 && inner.product.all_finite() {
            let new_r = numerical_rank(self.pair.u(), tol)?;
            if new_r < r {
                let (u, v) = (self.pair.u().clone(), self.pair.v().clone());
                let truncated = truncate_factors(&u, &v, new_r)?;
                if truncated.clamped {
                    self.warnings.push(format!("iteration {k}: rank(U) = 0, keeping one factor column"));
                }
                self.pair = truncated.pair;
            }
        }
        Ok(ProxOutput { x: inner.product, rank_x, r, inner_iters: inner.iterations })
    }
}

struct Exact;

impl ProxStep for Exact {
    fn step(&mut self, z: &Matrix, mu: f64, _k: usize, _clock: &mut Stopwatch) -> Result<ProxOutput> {
        let out = svt_with_rank(z, mu)?;
        let (m, n) = z.shape();
        Ok(ProxOutput { x: out.matrix, rank_x: out.rank, r: m.min(n), inner_iters: 0 })
    }
}

fn check_start(p: &Problem, cfg: &SolverConfig, x0: &Matrix) -> Result<()> {
    cfg.validate()?;
    if x0.shape() != p.domain_shape() {
        return Err(Error::dim("initial point", x0.shape(), p.domain_shape()));
    }
    Ok(())
}

fn run_outer(
    algorithm: Algorithm,
    p: &Problem,
    cfg: &SolverConfig,
    x0: &Matrix,
    prox: &mut dyn ProxStep,
    mut warnings: Vec<String>,
) -> Result<SolveTrace> {
    let lipschitz = p.lipschitz_bound()?;
    let gamma = cfg.gamma.unwrap_or(1.0 / lipschitz);
    if gamma >= 2.0 / lipschitz {
        warnings.push(format!("step size {gamma:e} is not below 2/L = {:e}", 2.0 / lipschitz));
    }
    if algorithm == Algorithm::Fista && gamma > 1.0 / lipschitz * (1.0 - 1e-12) {
        warnings.push("step size 1/L exceeds the usual FISTA bound; convergence is not guaranteed".into());
    }
    let mu = p.tau() * gamma;

    let mut trace = SolveTrace {
        algorithm,
        records: Vec::new(),
        x: x0.clone(),
        converged: false,
        iterations: 0,
        gamma,
        lipschitz,
        tau: p.tau(),
        rule: cfg.rule,
        warnings,
    };

    let mut x_prev = x0.clone();
    let mut x_cur = x0.clone();
    let mut step_prev = 0.0;
    let mut clock = Stopwatch::new();

    for k in 1..=cfg.stop.max_iter {
        clock.resume();
        let a = cfg.rule.value(k, step_prev);
        let y = if a != 0.0 {
            let mut y = x_cur.clone();
            y.axpy(a, &(&x_cur - &x_prev));
            y
        } else {
            x_cur.clone()
        };
        let mut z = y;
        let grad = p.gradient(&z)?;
        z.axpy(-gamma, &grad);
        if !z.all_finite() {
            clock.pause();
            return Err(diverged(trace, k));
        }
        let out = prox.step(&z, mu, k, &mut clock)?;
        let step_norm = (&out.x - &x_cur).frobenius_norm();
        clock.pause();

        if !out.x.all_finite() || !step_norm.is_finite() {
            return Err(diverged(trace, k));
        }
        let elapsed_seconds = clock.report();
        let objective = match cfg.trace {
            TraceLevel::Full => Some(p.objective(&out.x)?),
            TraceLevel::Light => None,
        };
        let probe_rank = if cfg.exact_prox_probe { Some(svt_with_rank(&z, mu)?.rank) } else { None };

        trace.records.push(IterationRecord {
            k,
            elapsed_seconds,
            objective,
            step_norm,
            rank_x: out.rank_x,
            r: out.r,
            inner_iters: out.inner_iters,
            inertial: a,
            probe_rank,
        });
        trace.iterations = k;

        let measured = if cfg.stop.relative { step_norm / x_cur.frobenius_norm().max(1.0) } else { step_norm };
        x_prev = std::mem::replace(&mut x_cur, out.x);
        step_prev = step_norm;
        if measured <= cfg.stop.step_tol {
            trace.converged = true;
            break;
        }
    }
    trace.x = x_cur;
    Ok(trace)
}

fn diverged(mut trace: SolveTrace, iteration: usize) -> Error {
    trace.iterations = trace.records.len();
    Error::Divergence { iteration, trace: Box::new(trace) }
}

/// Proximal gradient with an alternating-minimization inner solve in place
/// of the SVT. Continuation follows `cfg.continuation.enabled`.
pub fn prograamme_solve(p: &Problem, cfg: &SolverConfig, x0: &Matrix, seed: u64) -> Result<SolveTrace> {
    check_start(p, cfg, x0)?;
    let (m, n) = p.domain_shape();
    let mut rng = seeded(seed, Stream::Solver);
    let pair = FactorPair::random(m, n, cfg.rank, &mut rng);
    let mut prox = Factorized { cfg, pair, rng, warnings: Vec::new() };
    let algorithm = if cfg.continuation.enabled { Algorithm::PrograammeRc } else { Algorithm::Prograamme };
    let result = run_outer(algorithm, p, cfg, x0, &mut prox, Vec::new());
    result.map(|mut trace| {
        trace.warnings.append(&mut prox.warnings);
        trace
    })
}

/// Inertial proximal gradient with the exact SVT prox. With `InertialRule::Zero`
/// this is plain PGD; with `FistaLike` it is the FISTA-type baseline.
pub fn pgd_solve(p: &Problem, cfg: &SolverConfig, x0: &Matrix) -> Result<SolveTrace> {
    check_start(p, cfg, x0)?;
    let algorithm = if matches!(cfg.rule, InertialRule::FistaLike { .. }) { Algorithm::Fista } else { Algorithm::Pgd };
    run_outer(algorithm, p, cfg, x0, &mut Exact, Vec::new())
}

/// Runs `algorithm`, forcing the settings that define it: continuation off for
/// `prograamme`, on for `prograamme-rc`, and a `(k-1)/(k+d)` rule for `fista`
/// (`d = 20` unless the config already carries a FISTA-type rule).
pub fn solve(algorithm: Algorithm, p: &Problem, cfg: &SolverConfig, x0: &Matrix, seed: u64) -> Result<SolveTrace> {
    let effective = effective_config(algorithm, cfg);
    match algorithm {
        Algorithm::Prograamme | Algorithm::PrograammeRc => prograamme_solve(p, &effective, x0, seed),
        Algorithm::Pgd | Algorithm::Fista => {
            let mut trace = pgd_solve(p, &effective, x0)?;
            trace.algorithm = algorithm;
            Ok(trace)
        }
    }
}

pub fn effective_config(algorithm: Algorithm, cfg: &SolverConfig) -> SolverConfig {
    let mut effective = cfg.clone();
    match algorithm {
        Algorithm::Prograamme => effective.continuation.enabled = false,
        Algorithm::PrograammeRc => effective.continuation.enabled = true,
        Algorithm::Pgd => {}
        Algorithm::Fista => {
            if !matches!(effective.rule, InertialRule::FistaLike { .. }) {
                effective.rule = InertialRule::FistaLike { d: 20.0 };
            }
        }
    }
    effective
}
