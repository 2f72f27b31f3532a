//! Acceptance suite. Each test prints one `PASS`/`FAIL` line and fails when
//! its criterion is not met. Run with
//!
//! ```text
//! cargo test --release --test acceptance -- --nocapture --test-threads 1
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use arbirg::block::dist;
use arbirg::harness::diag::{error_moment_suite, harmonic_suite, tikhonov_step_suite};
use arbirg::harness::{
    bounds_for_experiment, compare_report, relative_oscillation, run_experiment, write_outputs, AggregateCurve,
    DiagOptions, ExperimentConfig, ExperimentResult,
};
use arbirg::metrics::rate_slope;
use arbirg::problem::InitialPoint;
use arbirg::problems::oracle::balanced_projection_oracle;
use arbirg::problems::{
    degenerate_face_instance, paper_cournot_instance, random_penalized_program, random_strongly_convex_instance,
    scalar_tikhonov_instance, solve_penalized,
};
use arbirg::rng::{derive_seed, rng_from_seed, substream};
use arbirg::sets::{project_balanced, SetDescriptor};
use arbirg::solvers::{run_arbirg, tikhonov_trajectory, Budget, Checkpoints, RunOptions};
use arbirg::{ProblemSpec, Schedule};
use rand::Rng;

const L1_BOX: &str = include_str!("../configs/l1_box.toml");
const COURNOT: &str = include_str!("../configs/cournot_paper.toml");

/// Prints the verdict line and fails the test when `passed` is false.
fn report(id: u32, title: &str, passed: bool, elapsed: Duration, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!("{verdict} [{id:>2}] {title} ({:.1} s): {detail}", elapsed.as_secs_f64());
    assert!(passed, "[{id}] {title}: {detail}");
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

struct L1Runs {
    cfg: ExperimentConfig,
    result: ExperimentResult,
    elapsed: Duration,
}

/// The ℓ1-box experiment behind the first two criteria, run once.
fn l1_runs() -> &'static L1Runs {
    static RUNS: OnceLock<L1Runs> = OnceLock::new();
    RUNS.get_or_init(|| {
        let cfg = ExperimentConfig::from_toml_str(L1_BOX).unwrap();
        let start = Instant::now();
        let result = run_experiment(&cfg).unwrap();
        L1Runs {
            cfg,
            result,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn c01_rate_bounds_hold_on_the_l1_box_instance() {
    let runs = l1_runs();
    let problem = runs.cfg.problem.build().unwrap();
    let shape_ok = problem.dim() == 8
        && problem.num_blocks() == 4
        && problem.sets().iter().all(|s| s.norm_bound() == Some(2f64.sqrt()))
        && runs.cfg.replications == 50;
    let max_n = runs.cfg.budget.full_map_equivalents.unwrap() * problem.num_blocks() as f64;

    let rows = bounds_for_experiment(&runs.cfg, &runs.result.aggregates).unwrap();
    let flagged: Vec<String> = rows
        .iter()
        .filter(|r| r.subopt_violation || r.gap_violation)
        .map(|r| format!("{} N={}", r.solver, r.n))
        .collect();
    let solvers: Vec<&str> = {
        let mut s: Vec<&str> = rows.iter().map(|r| r.solver.as_str()).collect();
        s.dedup();
        s
    };
    let aborted = runs.result.aborted_runs().count();
    let worst = rows
        .iter()
        .map(|r| (r.subopt_mean / r.subopt_bound).max(r.gap_mean.unwrap_or(0.0) / r.gap_bound))
        .fold(f64::NEG_INFINITY, f64::max);
    let passed = shape_ok
        && max_n >= 1e5
        && solvers.len() == 2
        && rows.iter().all(|r| r.gap_mean.is_some())
        && flagged.is_empty()
        && aborted == 0
        && within(runs.elapsed, 300);
    report(
        1,
        "rate bounds on the ℓ1-over-affine-box instance",
        passed,
        runs.elapsed,
        &format!(
            "{} checkpoints for {solvers:?} up to N = {max_n}, {} flagged {flagged:?}, max mean/bound = {worst:.2e}, {aborted} aborted",
            rows.len(),
            flagged.len()
        ),
    );
}

fn slope_of(curve: &AggregateCurve, value: impl Fn(&arbirg::harness::AggregatePoint) -> Option<f64>) -> f64 {
    let (ks, vs): (Vec<f64>, Vec<f64>) = curve
        .points
        .iter()
        .filter_map(|p| value(p).map(|v| (p.k as f64, v)))
        .unzip();
    rate_slope(&ks, &vs, 0.5).unwrap_or(f64::NAN)
}

#[test]
fn c02_rate_exponents_on_the_l1_box_instance() {
    let runs = l1_runs();
    let start = Instant::now();
    let fstar = runs.cfg.problem.build().unwrap().optimal_value().unwrap();
    let mut passed = !runs.result.aggregates.is_empty();
    let mut details = Vec::new();
    for curve in &runs.result.aggregates {
        let gap = slope_of(curve, |p| p.gap_estimate.map(|g| g.mean));
        let sub = slope_of(curve, |p| Some((p.f_value.mean - fstar).abs()));
        passed &= gap <= -0.15 && sub <= -0.15;
        details.push(format!("{}: gap slope {gap:.3}, suboptimality slope {sub:.3}", curve.solver));
    }
    report(2, "rate exponents on the ℓ1-over-affine-box instance", passed, start.elapsed(), &details.join("; "));
}

#[test]
fn c03_block_sampling_error_moments() {
    let start = Instant::now();
    let problem = paper_cournot_instance(7);
    let opts = DiagOptions {
        moment_points: 20,
        moment_draws: 100_000,
        seed: 2024,
        ..DiagOptions::default()
    };
    let d = error_moment_suite(&problem, &opts).unwrap();
    let elapsed = start.elapsed();
    report(3, "block sampling error moments", d.passed && within(elapsed, 60), elapsed, &d.detail);
}

#[test]
fn c04_harmonic_sum_bounds() {
    let start = Instant::now();
    let d = harmonic_suite().unwrap();
    report(4, "harmonic sum bounds", d.passed, start.elapsed(), &d.detail);
}

#[test]
fn c05_tikhonov_trajectory() {
    let start = Instant::now();
    let etas: Vec<f64> = (0..=200).map(|k| ((k + 1) as f64).powf(-0.3)).collect();
    let mut passed = true;
    let mut details = Vec::new();
    for problem in [scalar_tikhonov_instance(), degenerate_face_instance()] {
        let xstar = problem.known_solution().unwrap().to_vec();
        let path = tikhonov_trajectory(&problem, &etas, 1e-12).unwrap();
        let errs: Vec<f64> = path.iter().map(|p| dist(p.as_slice(), &xstar)).collect();
        let decreasing = errs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let final_err = *errs.last().unwrap();
        let reached = errs.iter().any(|&e| e < 1e-3);
        let step = tikhonov_step_suite(&problem, 200).unwrap();
        passed &= decreasing && reached && step.passed;
        details.push(format!(
            "{}: (a) decreasing = {decreasing}, error at η_200 = {:.4} is {} 1e-3; (b) {}",
            problem.name(),
            final_err,
            if reached { "below" } else { "not below" },
            step.detail
        ));
    }
    let elapsed = start.elapsed();
    report(5, "Tikhonov trajectory", passed && within(elapsed, 60), elapsed, &details.join("; "));
}

#[test]
fn c06_convergence_with_unbounded_x() {
    let start = Instant::now();
    let problem = random_strongly_convex_instance(1);
    let xstar = problem.known_solution().unwrap().to_vec();
    let schedule = Schedule::unbounded(0.5, 0.01, 0.6, 0.3, 0.0);
    let n = 200_000;
    let reps = 25;
    let mut total = 0.0;
    for rep in 0..reps {
        let opts = RunOptions::new(Budget::iterations(n), derive_seed(6, "unbounded", rep))
            .with_checkpoints(Checkpoints::At(vec![n]))
            .without_wall_clock();
        let trace = run_arbirg(&problem, &schedule, &opts).unwrap();
        total += dist(&trace.final_point, &xstar);
    }
    let mean = total / reps as f64;
    let elapsed = start.elapsed();
    let shape_ok = problem.dim() == 6 && problem.num_blocks() == 3 && !problem.is_bounded();
    report(
        6,
        "convergence with unbounded X",
        shape_ok && mean <= 1e-2 && within(elapsed, 180),
        elapsed,
        &format!("mean ‖x̄_N − x*‖ = {mean:.3e} at N = {n} over {reps} replications"),
    );
}

/// Idempotence, nonexpansiveness and the variational characterization of
/// `set` on `count` random input pairs; returns the number of failures.
fn projection_failures(set: &SetDescriptor, count: usize, seed: u64) -> usize {
    let mut rng = rng_from_seed(seed);
    let n = set.dim();
    let mut failures = 0;
    for _ in 0..count {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let pv = set.project(&v).unwrap();
        let pw = set.project(&w).unwrap();
        let idempotent = dist(&set.project(&pv).unwrap(), &pv) <= 1e-9;
        let nonexpansive = dist(&pv, &pw) <= dist(&v, &w) + 1e-9;
        let y = set.sample(&mut rng).unwrap_or_else(|| set.sample_projected_normal(&mut rng));
        let vi: f64 = v.iter().zip(&pv).zip(&y).map(|((a, p), b)| (a - p) * (b - p)).sum();
        if !(idempotent && nonexpansive && vi <= 1e-8 && set.contains(&pv, 1e-9)) {
            failures += 1;
        }
    }
    failures
}

#[test]
fn c07_projection_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = rng_from_seed(7);
    let mut max_err = 0.0f64;
    for t in 0..500 {
        let j = 1 + t % 3;
        let caps: Vec<f64> = (0..j).map(|_| rng.random_range(0.1..5.0)).collect();
        let y0: Vec<f64> = (0..j).map(|_| rng.random_range(-6.0..6.0)).collect();
        let s0: Vec<f64> = (0..j).map(|_| rng.random_range(-6.0..6.0)).collect();
        let (y, s) = project_balanced(&caps, &y0, &s0).unwrap();
        let (yo, so) = balanced_projection_oracle(&caps, &y0, &s0).unwrap();
        for (a, b) in y.iter().chain(&s).zip(yo.iter().chain(&so)) {
            max_err = max_err.max((a - b).abs());
        }
    }
    let kinds = [
        ("box", SetDescriptor::boxed(vec![-1.0, 0.0, -2.0], vec![1.0, 0.5, 3.0]).unwrap()),
        ("ball", SetDescriptor::ball(vec![0.5, -0.5, 1.0], 2.0).unwrap()),
        ("orthant", SetDescriptor::nonneg_orthant(3)),
        ("whole space", SetDescriptor::whole_space(3)),
        ("balanced", SetDescriptor::balanced_box(vec![1.0, 2.5, 0.7]).unwrap()),
    ];
    let mut failures = Vec::new();
    for (i, (name, set)) in kinds.iter().enumerate() {
        let f = projection_failures(set, 1000, 100 + i as u64);
        failures.push(format!("{name}: {f}/1000"));
        max_err = if f > 0 { f64::INFINITY } else { max_err };
    }
    report(
        7,
        "projection oracle equivalence",
        max_err <= 1e-8,
        start.elapsed(),
        &format!("max coordinate error vs oracle on 500 instances = {max_err:.2e}; property failures {failures:?}"),
    );
}

#[test]
fn c08_penalized_programs_recover_feasible_points() {
    let start = Instant::now();
    let mut worst_eq = 0.0f64;
    let mut worst_h = f64::NEG_INFINITY;
    let mut passed = true;
    for seed in 0..20 {
        let prog = random_penalized_program(seed);
        let x0 = prog
            .problem
            .initial_point(&InitialPoint::ProjectedNormal, &mut substream(seed, 0))
            .unwrap();
        match solve_penalized(&prog.problem, x0.as_slice(), 1e-8, 20_000_000) {
            Ok(sol) => {
                worst_eq = worst_eq.max(prog.map.equality_residual(&sol.x));
                worst_h = worst_h.max(prog.map.max_violation(&sol.x));
            }
            Err(_) => passed = false,
        }
    }
    let elapsed = start.elapsed();
    passed &= worst_eq <= 1e-6 && worst_h <= 1e-6 && within(elapsed, 60);
    report(
        8,
        "penalized programs recover feasible points",
        passed,
        elapsed,
        &format!("20 programs: max ‖Ax − b‖ = {worst_eq:.2e}, max h_j = {worst_h:.2e}"),
    );
}

fn cournot_config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_toml_str(COURNOT).unwrap();
    cfg.record_wall_clock = false;
    cfg
}

struct CournotRun {
    result: ExperimentResult,
    dir: PathBuf,
    elapsed: Duration,
}

/// A fresh output directory under cargo's per-target scratch space.
fn scratch_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn cournot_run() -> &'static CournotRun {
    static RUN: OnceLock<CournotRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let result = run_experiment(&cournot_config()).unwrap();
        let elapsed = start.elapsed();
        let dir = scratch_dir("acceptance-cournot-first");
        write_outputs(&result, &dir).unwrap();
        CournotRun { result, dir, elapsed }
    })
}

#[test]
fn c09_cournot_comparison_with_sequential_regularization() {
    let run = cournot_run();
    let cfg = &run.result.config;
    let problem: ProblemSpec = cfg.problem.build().unwrap();
    let shape_ok = problem.num_blocks() == 4 && problem.dim() == 24 && cfg.replications == 25 && cfg.cells.len() == 3;
    let rows = compare_report(&run.result.aggregates).unwrap();
    let dominated: Vec<String> = rows.iter().filter(|r| !r.dominates).map(|r| format!("{} in {}", r.solver, r.cell)).collect();
    let oscillation = run
        .result
        .aggregates
        .iter()
        .filter(|c| c.method == "arbirg")
        .map(|c| relative_oscillation(&c.f_series(), 0.2))
        .fold(0.0f64, f64::max);
    let ratios: Vec<String> = rows
        .iter()
        .map(|r| format!("{}/{}: {:.3e} vs {:.3e}", r.cell, r.solver, r.final_accuracy, r.baseline_final_accuracy))
        .collect();
    let passed = shape_ok
        && dominated.is_empty()
        && oscillation <= 0.01
        && run.result.aborted_runs().count() == 0
        && within(run.elapsed, 600);
    report(
        9,
        "Cournot comparison with sequential regularization",
        passed,
        run.elapsed,
        &format!(
            "aRB-IRG dominates in {}/{} comparisons (not in {dominated:?}); max trailing oscillation of f = {:.2}%; final gap {ratios:?}",
            rows.len() - dominated.len(),
            rows.len(),
            100.0 * oscillation
        ),
    );
}

fn run_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir.join("runs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
}

#[test]
fn c10_repeated_cournot_runs_are_byte_identical() {
    let first = cournot_run();
    let start = Instant::now();
    let again = run_experiment(&cournot_config()).unwrap();
    let dir = scratch_dir("acceptance-cournot-second");
    write_outputs(&again, &dir).unwrap();
    let a = run_files(&first.dir);
    let b = run_files(&dir);
    let names = |v: &[PathBuf]| v.iter().map(|p| p.file_name().unwrap().to_owned()).collect::<Vec<_>>();
    let mut differing = Vec::new();
    if names(&a) == names(&b) {
        for (x, y) in a.iter().zip(&b) {
            if fs::read(x).unwrap() != fs::read(y).unwrap() {
                differing.push(x.file_name().unwrap().to_string_lossy().into_owned());
            }
        }
    } else {
        differing.push("file sets differ".into());
    }
    report(
        10,
        "repeated Cournot runs are byte-identical",
        !a.is_empty() && differing.is_empty(),
        start.elapsed(),
        &format!("{} per-run CSVs compared, {} differ {differing:?}", a.len(), differing.len()),
    );
}
