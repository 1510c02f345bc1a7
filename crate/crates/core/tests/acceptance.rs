//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report is always shown:
//!
//! ```text
//! cargo test -p lowrank-core --test acceptance
//! ```
//!
//! Instances are seeded; reruns reproduce every number except wall times.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use lowrank_core::amfit::{inner_solve, FactorPair, InnerPolicy, InnerStop};
use lowrank_core::bench::{repeat_instance, run_suite, BenchEntry, BenchReport, BenchSuite, TauChoice};
use lowrank_core::linalg::{numerical_rank, Matrix, DEFAULT_RANK_TOL};
use lowrank_core::operators::{ObservationOp, Problem};
use lowrank_core::problems::{
    condition_number_sweep, generate, NoiseModel, SyntheticInstance, SyntheticSpec, WeightModel,
    CONDITION_SWEEP_MAXIMA,
};
use lowrank_core::prox::svt_with_rank;
use lowrank_core::rng::{gaussian_matrix, seeded, Stream};
use lowrank_core::solver::{
    pgd_solve, prograamme_solve, solve, Algorithm, InertialRule, SolveTrace, SolverConfig, StopRule, TraceLevel,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn completion_spec(m: usize, rank: usize, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        m,
        n: m,
        rank,
        noise: NoiseModel::AdditiveGaussian { sigma: 0.1 },
        weights: WeightModel::AllOnes,
        mask: Some(0.5),
        exact_mask_count: false,
        sensing_rows: None,
        seed,
    }
}

fn sensing_spec() -> SyntheticSpec {
    SyntheticSpec { mask: None, sensing_rows: Some(2352), ..completion_spec(100, 4, 2024) }
}

fn tight_inner() -> InnerPolicy {
    InnerPolicy::Tolerance { eps: 1e-10, max_inner: 500 }
}

fn rel_dist(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

fn same_run(a: &SolveTrace, b: &SolveTrace) -> bool {
    a.timing_free_rows() == b.timing_free_rows()
        && a.x.as_slice().iter().map(|v| v.to_bits()).eq(b.x.as_slice().iter().map(|v| v.to_bits()))
}

/// Random instance of one operator variant with positive weights.
fn variant_problem(variant: usize, seed: u64) -> Problem {
    let (m, n) = (6, 5);
    let mut rng = seeded(seed, Stream::Truth);
    let op = match variant {
        0 => ObservationOp::identity(m, n),
        1 => {
            let mask = Matrix::from_fn(m, n, |i, j| ((i * 7 + j * 3 + seed as usize) % 3 != 0) as u8 as f64);
            ObservationOp::entry_mask(mask).unwrap()
        }
        _ => ObservationOp::dense_sensing(gaussian_matrix(&mut rng, 17, m * n), m, n).unwrap(),
    };
    let (rows, cols) = op.codomain_shape();
    let observed = gaussian_matrix(&mut rng, rows, cols);
    let weights = gaussian_matrix(&mut rng, rows, cols).map(|v| 0.2 + v.abs());
    Problem::new(op, observed, weights, 0.5).unwrap()
}


// 1. The alternating inner solve reproduces the SVT.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut cases = 0;
    for seed in 0..50u64 {
        let z = gaussian_matrix(&mut seeded(seed, Stream::Truth), 20, 20);
        let bound = 1e-6 * z.frobenius_norm().max(1.0);
        for mu in [0.1, 1.0, 5.0] {
            let target = svt_with_rank(&z, mu).unwrap();
            let r = target.rank.max(1);
            let pair = FactorPair::random(20, 20, r, &mut seeded(seed, Stream::Solver));
            let out = inner_solve(&z, mu, pair, InnerStop::Tolerance { eps: 1e-10, max_inner: 500 }).unwrap();
            let err = (&out.product - &target.matrix).frobenius_norm();
            worst = worst.max(err / bound * 1e-6);
            failures += (err > bound) as usize;
            cases += 1;
        }
    }
    let elapsed = start.elapsed();

    // informational: the same protocol on further matrices
    let mut extra_failures = 0;
    for seed in 50..100u64 {
        let z = gaussian_matrix(&mut seeded(seed, Stream::Truth), 20, 20);
        let bound = 1e-6 * z.frobenius_norm().max(1.0);
        for mu in [0.1, 1.0, 5.0] {
            let target = svt_with_rank(&z, mu).unwrap();
            let pair = FactorPair::random(20, 20, target.rank.max(1), &mut seeded(seed, Stream::Solver));
            let out = inner_solve(&z, mu, pair, InnerStop::Tolerance { eps: 1e-10, max_inner: 500 }).unwrap();
            extra_failures += ((&out.product - &target.matrix).frobenius_norm() > bound) as usize;
        }
    }
    outcome(
        failures == 0 && within(elapsed, 10.0),
        format!(
            "{failures}/{cases} cases over the bound, worst error {worst:.3e} x max(||Z||,1) (limit 1e-6), {:.2} s; \
             informational: {extra_failures}/150 over the bound on seeds 50..99",
            elapsed.as_secs_f64()
        ),
    )
}

// 2. Gradient against central differences.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for variant in 0..3 {
        for seed in 0..20u64 {
            let p = variant_problem(variant, 1000 * variant as u64 + seed);
            let x = gaussian_matrix(&mut seeded(seed, Stream::Noise), 6, 5);
            let g = p.gradient(&x).unwrap();
            let fd = Matrix::from_fn(6, 5, |i, j| {
                let mut plus = x.clone();
                plus.set(i, j, x.get(i, j) + h);
                let mut minus = x.clone();
                minus.set(i, j, x.get(i, j) - h);
                (p.loss(&plus).unwrap() - p.loss(&minus).unwrap()) / (2.0 * h)
            });
            worst = worst.max(rel_dist(&fd, &g));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-5 && within(elapsed, 5.0),
        format!("worst relative error {worst:.2e} over 3 x 20 instances (limit 1e-5), {:.3} s", elapsed.as_secs_f64()),
    )
}

// 3. Sampled Lipschitz inequality.
fn criterion_3() -> Outcome {
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for variant in 0..3 {
        let p = variant_problem(variant, 77 + variant as u64);
        let l = p.lipschitz_bound().unwrap();
        let mut rng = seeded(500 + variant as u64, Stream::Noise);
        for _ in 0..100 {
            let x = gaussian_matrix(&mut rng, 6, 5);
            let y = gaussian_matrix(&mut rng, 6, 5);
            let lhs = (&p.gradient(&x).unwrap() - &p.gradient(&y).unwrap()).frobenius_norm();
            let rhs = l * (&x - &y).frobenius_norm();
            worst_ratio = worst_ratio.max(lhs / rhs);
            violations += (lhs > rhs) as usize;
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations in 3 x 100 pairs; largest ||grad diff|| / (L ||X - Y||) = {worst_ratio:.3}"),
    )
}

struct Agreement {
    problem: Problem,
    cfg: SolverConfig,
    am: SolveTrace,
    exact: SolveTrace,
}

fn agreement_run() -> Agreement {
    let inst = generate(&completion_spec(50, 3, 404)).unwrap();
    let problem = inst.problem(inst.noise_norm()).unwrap();
    let cfg = SolverConfig {
        rank: 10,
        inner: tight_inner(),
        stop: StopRule { step_tol: 1e-10, relative: false, max_iter: 20_000 },
        trace: TraceLevel::Full,
        ..SolverConfig::default()
    };
    let x0 = Matrix::zeros(50, 50);
    let am = prograamme_solve(&problem, &cfg, &x0, 404).unwrap();
    let exact = pgd_solve(&problem, &cfg, &x0).unwrap();
    Agreement { problem, cfg, am, exact }
}

// 4. ProGrAMMe and PGD reach the same solution.
fn criterion_4(run: &Agreement, elapsed: Duration) -> Outcome {
    let dist = rel_dist(&run.am.x, &run.exact.x);
    outcome(
        run.am.converged && run.exact.converged && dist <= 1e-6 && within(elapsed, 30.0),
        format!(
            "relative distance {dist:.2e} (limit 1e-6); iterations {} / {}; ranks {} / {}; {:.2} s",
            run.am.iterations,
            run.exact.iterations,
            run.am.final_rank(),
            run.exact.final_rank(),
            elapsed.as_secs_f64()
        ),
    )
}

struct Identification {
    inst: SyntheticInstance,
    cfg: SolverConfig,
    am: SolveTrace,
    exact: SolveTrace,
}

fn identification_run() -> Identification {
    let inst = generate(&sensing_spec()).unwrap();
    let problem = inst.problem(2.0 * inst.noise_norm()).unwrap();
    let cfg = SolverConfig {
        rank: 20,
        inner: InnerPolicy::Fixed { passes: 1 },
        stop: StopRule { step_tol: 1e-6, relative: true, max_iter: 5000 },
        ..SolverConfig::default()
    };
    let x0 = Matrix::zeros(100, 100);
    let am = prograamme_solve(&problem, &cfg, &x0, 2024).unwrap();
    let exact = pgd_solve(&problem, &cfg, &x0).unwrap();
    Identification { inst, cfg, am, exact }
}

// 5. Both rank traces settle on the rank of the PGD solution.
fn criterion_5(run: &Identification, elapsed: Duration) -> Outcome {
    let target = numerical_rank(&run.exact.x, DEFAULT_RANK_TOL).unwrap();
    let settled = |t: &SolveTrace| t.rank_settled_at().filter(|&k| k < t.iterations);
    let (sa, se) = (settled(&run.am), settled(&run.exact));
    let pass = run.am.converged
        && run.exact.converged
        && sa.is_some()
        && se.is_some()
        && run.am.final_rank() == target
        && run.exact.final_rank() == target
        && within(elapsed, 60.0);
    outcome(
        pass,
        format!(
            "rank(PGD solution) = {target}; prograamme settles at k = {} of {} on rank {}, pgd at k = {} of {} on rank {}; {:.1} s",
            sa.map_or("-".into(), |k| k.to_string()),
            run.am.iterations,
            run.am.final_rank(),
            se.map_or("-".into(), |k| k.to_string()),
            run.exact.iterations,
            run.exact.final_rank(),
            elapsed.as_secs_f64()
        ),
    )
}

fn timing_suite() -> BenchSuite {
    let spec = completion_spec(400, 10, 2000);
    let config = SolverConfig {
        rank: 200,
        inner: InnerPolicy::Fixed { passes: 1 },
        stop: StopRule { step_tol: 1e-8, relative: false, max_iter: 5000 },
        ..SolverConfig::default()
    };
    let entry = |name: &str, algorithm| BenchEntry {
        name: name.into(),
        spec: spec.clone(),
        config: config.clone(),
        algorithm,
        tau: TauChoice::Preset("noise_norm".into()),
    };
    BenchSuite {
        entries: vec![
            entry("prograamme-rc", Algorithm::PrograammeRc),
            entry("prograamme", Algorithm::Prograamme),
            entry("pgd", Algorithm::Pgd),
        ],
    }
}

// 6. Wall-time ordering at desk scale.
fn criterion_6(report: &BenchReport, elapsed: Duration) -> Outcome {
    let wall = |name: &str| report.row(name).unwrap().mean_wall_seconds;
    let (rc, am, pgd) = (wall("prograamme-rc"), wall("prograamme"), wall("pgd"));
    let all_converged = report.runs.iter().all(|r| r.converged);
    outcome(
        all_converged && rc <= am && am <= 0.5 * pgd && within(elapsed, 300.0),
        format!(
            "mean solver time over 5 repeats: prograamme-rc {rc:.3} s <= prograamme {am:.3} s <= 0.5 x pgd ({pgd:.3} s); \
             speedup pgd/prograamme-rc = {:.1}x; total {:.0} s",
            pgd / rc,
            elapsed.as_secs_f64()
        ),
    )
}

// 7. Rank continuation never grows r.
fn criterion_7(runs: &[(String, SolveTrace, usize)], timing: &BenchReport) -> Outcome {
    let mut bad = Vec::new();
    for (label, trace, initial) in runs {
        let rs: Vec<usize> = trace.records.iter().map(|r| r.r).collect();
        let monotone = rs.windows(2).all(|w| w[1] <= w[0]);
        if !monotone || trace.final_rank() > *initial || rs.first().is_some_and(|&r| r > *initial) {
            bad.push(label.clone());
        }
    }
    let planted: Vec<usize> = timing
        .runs
        .iter()
        .filter(|r| r.algorithm == Algorithm::PrograammeRc)
        .map(|r| r.final_rank)
        .collect();
    let planted_ok = !planted.is_empty() && planted.iter().all(|&r| r == 10);
    outcome(
        bad.is_empty() && planted_ok,
        format!(
            "{} prograamme-rc runs checked, non-monotone or over budget: {:?}; final ranks on the 400x400 instance: {planted:?} (planted 10)",
            runs.len(),
            bad
        ),
    )
}

// 8. Objective never increases with a_k = 0, gamma = 1/L and tight inner solves.
fn criterion_8(instances: &[(String, Problem, u64)]) -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut violations = 0;
    for (label, problem, seed) in instances {
        let (m, n) = problem.domain_shape();
        let cfg = SolverConfig {
            rank: 20.min(m.min(n)),
            inner: tight_inner(),
            trace: TraceLevel::Full,
            stop: StopRule { step_tol: 1e-6, relative: true, max_iter: 3000 },
            ..SolverConfig::default()
        };
        let x0 = Matrix::zeros(m, n);
        for (name, trace) in [
            ("prograamme", prograamme_solve(problem, &cfg, &x0, *seed).unwrap()),
            ("pgd", pgd_solve(problem, &cfg, &x0).unwrap()),
        ] {
            let obj = trace.objective_trace();
            let count = obj.windows(2).filter(|w| w[1] > w[0] + 1e-12 * w[0].abs()).count();
            if count > 0 {
                let worst = obj.windows(2).map(|w| (w[1] - w[0]) / w[0].abs()).fold(f64::MIN, f64::max);
                lines.push(format!("{label}/{name}: {count} increases (worst {worst:.1e})"));
            }
            violations += count;
        }
    }
    outcome(
        violations == 0,
        format!(
            "{} instances x 2 solvers, {violations} increases beyond 1e-12 relative{}; {:.0} s",
            instances.len(),
            if lines.is_empty() { String::new() } else { format!(" [{}]", lines.join("; ")) },
            start.elapsed().as_secs_f64()
        ),
    )
}

fn inertial_suite() -> BenchSuite {
    let spec = SyntheticSpec { weights: WeightModel::UniformInt { w_min: 1, w_max: 5 }, ..completion_spec(100, 5, 41) };
    let rules = [
        ("a0", InertialRule::Zero),
        ("a0.25", InertialRule::Constant { a: 0.25 }),
        ("a0.5", InertialRule::Constant { a: 0.5 }),
        ("a0.75", InertialRule::Constant { a: 0.75 }),
        ("fista-like", InertialRule::FistaLike { d: 20.0 }),
    ];
    BenchSuite {
        entries: rules
            .into_iter()
            .map(|(name, rule)| BenchEntry {
                name: name.into(),
                spec: spec.clone(),
                config: SolverConfig {
                    rule,
                    rank: 30,
                    inner: InnerPolicy::EPSILON_DEFAULT,
                    stop: StopRule { step_tol: 1e-6, relative: true, max_iter: 5000 },
                    ..SolverConfig::default()
                },
                algorithm: Algorithm::Prograamme,
                tau: TauChoice::Preset("noise_norm".into()),
            })
            .collect(),
    }
}

// 9. The five-rule inertial sweep completes and converges.
fn criterion_9() -> (Outcome, BenchReport) {
    let dir = std::env::temp_dir().join(format!("lowrank-acceptance-{}", std::process::id()));
    let report = run_suite(&inertial_suite(), 3, Some(&dir)).unwrap();
    let csv = std::fs::read_to_string(dir.join("aggregate.csv")).unwrap_or_default();
    let rows = csv.lines().count().saturating_sub(1);
    let _ = std::fs::remove_dir_all(&dir);
    let all_converged = report.runs.iter().all(|r| r.converged);
    let mut table = String::new();
    for row in &report.aggregate {
        let _ = write!(table, " {}: {:.0} it / {:.3} s;", row.name, row.mean_iterations, row.mean_wall_seconds);
    }
    (outcome(all_converged && rows == 5, format!("{rows} aggregate rows, all converged: {all_converged};{table}")), report)
}

fn condition_base() -> SyntheticSpec {
    SyntheticSpec {
        m: 100,
        n: 100,
        rank: 5,
        noise: NoiseModel::AdditiveGaussian { sigma: 1.0 },
        weights: WeightModel::UniformInt { w_min: 1, w_max: 10 },
        mask: None,
        exact_mask_count: false,
        sensing_rows: None,
        seed: 7,
    }
}

/// `tau` proportional to `max W̃`, so the prox threshold `tau * gamma` is the
/// same for every weight scale.
fn condition_config() -> SolverConfig {
    SolverConfig {
        rank: 20,
        inner: InnerPolicy::EPSILON_DEFAULT,
        stop: StopRule { step_tol: 1e-6, relative: true, max_iter: 5000 },
        ..SolverConfig::default()
    }
}

const CONDITION_THRESHOLD: f64 = 25.0;

fn condition_problem(inst: &SyntheticInstance) -> Problem {
    let w_max = inst.weights.max();
    inst.problem(CONDITION_THRESHOLD * w_max * w_max).unwrap()
}

// 10. Iteration counts across the weight-scale sweep.
fn criterion_10() -> Outcome {
    let sweep = condition_number_sweep(&condition_base(), &CONDITION_SWEEP_MAXIMA).unwrap();
    let cfg = condition_config();
    let mut am_iters = Vec::new();
    let mut table = String::new();
    let mut kappas = Vec::new();
    let mut all_converged = true;
    for entry in &sweep {
        let p = condition_problem(&entry.instance);
        let x0 = Matrix::zeros(100, 100);
        let am = solve(Algorithm::Prograamme, &p, &cfg, &x0, 7).unwrap();
        let exact = solve(Algorithm::Pgd, &p, &cfg, &x0, 7).unwrap();
        all_converged &= am.converged;
        am_iters.push(am.iterations);
        kappas.push(entry.kappa);
        let _ = write!(
            table,
            " [{} k={:.0} prog {}it/r{} pgd {}it/r{}]",
            entry.w_max,
            entry.kappa,
            am.iterations,
            am.final_rank(),
            exact.iterations,
            exact.final_rank()
        );
    }
    let lo = *am_iters.iter().min().unwrap() as f64;
    let hi = *am_iters.iter().max().unwrap() as f64;
    let kmin = kappas.iter().copied().fold(f64::INFINITY, f64::min);
    let kmax = kappas.iter().copied().fold(0.0, f64::max);
    // The criterion needs kappa_W to span three decades. With integer weights
    // drawn uniformly from 1..=w_max, kappa_W is nearly scale invariant in
    // w_max, so the sweep only spans about one decade and this part fails.
    let decades = (kmax / kmin).log10();
    outcome(
        all_converged && hi < 10.0 * lo && decades >= 3.0,
        format!(
            "prograamme iterations {lo}..{hi} (ratio {:.2}, limit 10) over kappa_W {kmin:.0}..{kmax:.0} \
             ({decades:.1} decades, need 3);{table}",
            hi / lo
        ),
    )
}

// 11. Reruns are bitwise identical apart from timings.
fn criterion_11(agreement: &Agreement, ident: &Identification, timing: &BenchSuite, inertial: &BenchReport) -> Outcome {
    let mut checked = Vec::new();
    let mut mismatched = Vec::new();
    let mut check = |label: &str, ok: bool| {
        checked.push(label.to_string());
        if !ok {
            mismatched.push(label.to_string());
        }
    };

    check("generate", generate(&sensing_spec()).unwrap() == ident.inst);

    let x0 = Matrix::zeros(50, 50);
    check("c4 prograamme", same_run(&prograamme_solve(&agreement.problem, &agreement.cfg, &x0, 404).unwrap(), &agreement.am));
    check("c4 pgd", same_run(&pgd_solve(&agreement.problem, &agreement.cfg, &x0).unwrap(), &agreement.exact));

    let p5 = ident.inst.problem(2.0 * ident.inst.noise_norm()).unwrap();
    check("c5 prograamme", same_run(&prograamme_solve(&p5, &ident.cfg, &Matrix::zeros(100, 100), 2024).unwrap(), &ident.am));

    let entry = &timing.entries[0];
    let inst = repeat_instance(entry, 0).unwrap();
    let p6 = inst.problem(inst.noise_norm()).unwrap();
    let seed = lowrank_core::bench::repeat_seed(&entry.spec, 0);
    let a = solve(entry.algorithm, &p6, &entry.config, &Matrix::zeros(400, 400), seed).unwrap();
    let b = solve(entry.algorithm, &p6, &entry.config, &Matrix::zeros(400, 400), seed).unwrap();
    check("c6 prograamme-rc", same_run(&a, &b));

    let suite = inertial_suite();
    let again = run_suite(&BenchSuite { entries: vec![suite.entries[4].clone()] }, 1, None).unwrap();
    let first = inertial.runs.iter().find(|r| r.name == suite.entries[4].name && r.repeat == 0).unwrap();
    check("c9 fista-like", same_run(&again.runs[0].trace, &first.trace));

    let sweep = condition_number_sweep(&condition_base(), &[1000]).unwrap();
    let p10 = condition_problem(&sweep[0].instance);
    let cfg = condition_config();
    let a = solve(Algorithm::Prograamme, &p10, &cfg, &Matrix::zeros(100, 100), 7).unwrap();
    let b = solve(Algorithm::Prograamme, &p10, &cfg, &Matrix::zeros(100, 100), 7).unwrap();
    check("c10 prograamme", same_run(&a, &b));

    outcome(mismatched.is_empty(), format!("{} reruns compared, mismatches: {mismatched:?}", checked.len()))
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; listing must stay cheap.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let total = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |n: usize, name: &'static str, o: Outcome| {
        println!("criterion {n:>2} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };

    report(1, "inner loop matches SVT", criterion_1());
    report(2, "gradient vs finite differences", criterion_2());
    report(3, "Lipschitz bound", criterion_3());

    let t = Instant::now();
    let agreement = agreement_run();
    report(4, "prograamme/pgd agreement", criterion_4(&agreement, t.elapsed()));

    let t = Instant::now();
    let ident = identification_run();
    report(5, "rank identification", criterion_5(&ident, t.elapsed()));

    let t = Instant::now();
    let timing = timing_suite();
    let timing_report = run_suite(&timing, 5, None).unwrap();
    report(6, "timing ordering", criterion_6(&timing_report, t.elapsed()));

    let (c9, inertial_report) = criterion_9();

    let mut rc_runs: Vec<(String, SolveTrace, usize)> = timing_report
        .runs
        .iter()
        .filter(|r| r.algorithm == Algorithm::PrograammeRc)
        .map(|r| (format!("timing rep{}", r.repeat), r.trace.clone(), 200))
        .collect();
    {
        let inst = generate(&completion_spec(100, 5, 41)).unwrap();
        let p = inst.problem(inst.noise_norm()).unwrap();
        let mut cfg = SolverConfig { rank: 60, ..SolverConfig::default() };
        cfg.continuation.burn_in = 5;
        cfg.continuation.cadence = 3;
        for (i, rule) in [InertialRule::Zero, InertialRule::Constant { a: 0.5 }].into_iter().enumerate() {
            let cfg = SolverConfig { rule, ..cfg.clone() };
            let trace = solve(Algorithm::PrograammeRc, &p, &cfg, &Matrix::zeros(100, 100), i as u64).unwrap();
            rc_runs.push((format!("100x100 rule {i}"), trace, 60));
        }
    }
    report(7, "rank continuation monotone", criterion_7(&rc_runs, &timing_report));

    let descent_instances = {
        let c4 = generate(&completion_spec(50, 3, 404)).unwrap();
        let c5 = &ident.inst;
        let c6 = repeat_instance(&timing.entries[0], 0).unwrap();
        let c9 = repeat_instance(&inertial_suite().entries[0], 0).unwrap();
        let c10 = condition_number_sweep(&condition_base(), &[10, 10_000, 10_000_000]).unwrap();
        let mut list = vec![
            ("c4 completion 50x50".to_string(), c4.problem(c4.noise_norm()).unwrap(), 404),
            ("c5 sensing 100x100".to_string(), c5.problem(2.0 * c5.noise_norm()).unwrap(), 2024),
            ("c6 completion 400x400".to_string(), c6.problem(c6.noise_norm()).unwrap(), 2000),
            ("c9 weighted completion 100x100".to_string(), c9.problem(c9.noise_norm()).unwrap(), 41),
        ];
        for e in &c10 {
            list.push((format!("c10 w_max {}", e.w_max), condition_problem(&e.instance), 7));
        }
        list
    };
    report(8, "objective descent", criterion_8(&descent_instances));
    report(9, "inertial sweep", c9);
    report(10, "condition-number robustness", criterion_10());
    report(11, "determinism", criterion_11(&agreement, &ident, &timing, &inertial_report));

    let failed: Vec<usize> = results.iter().filter(|(_, _, o)| !o.pass).map(|(n, _, _)| *n).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.0} s",
        results.len() - failed.len(),
        results.len(),
        total.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
