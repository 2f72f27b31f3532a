//! Self-contained diagnostic suites: the harmonic-sum bounds, the moments
//! of the block-sampling error, and the step bound of the Tikhonov
//! trajectory.

use crate::block::{dist, norm};
use crate::error::Result;
use crate::metrics::{harmonic_bounds_check, harmonic_threshold, rb_error_moments, tikhonov_step_bound};
use crate::problem::ProblemSpec;
use crate::problems::{degenerate_face_instance, paper_cournot_instance, scalar_tikhonov_instance};
use crate::rng::substream;
use crate::solvers::{max_subgradient_norm, tikhonov_trajectory};

#[derive(Debug, Clone, PartialEq)]
pub struct DiagOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagOptions {
    pub moment_points: usize,
    pub moment_draws: usize,
    pub seed: u64,
    /// Trajectory length for the Tikhonov suite.
    pub trajectory_len: usize,
}

impl Default for DiagOptions {
    fn default() -> Self {
        Self {
            moment_points: 20,
            moment_draws: 100_000,
            seed: 2024,
            trajectory_len: 200,
        }
    }
}

/// `α ∈ {0, 0.1, …, 0.9}` against `N ∈ {threshold, 10², 10³, 10⁴}`, keeping
/// only admissible `N`.
pub fn harmonic_suite() -> Result<DiagOutcome> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for i in 0..10 {
        let alpha = i as f64 / 10.0;
        let t = harmonic_threshold(alpha);
        for n in [t, 100, 1_000, 10_000] {
            if n < t {
                continue;
            }
            let h = harmonic_bounds_check(alpha, n)?;
            checked += 1;
            if !h.ok {
                failures.push(format!("α={alpha} N={n}: {} ∉ [{}, {}]", h.sum, h.lower, h.upper));
            }
        }
    }
    Ok(DiagOutcome {
        name: "harmonic sum bounds".into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{checked} (α, N) pairs within bounds")
        } else {
            failures.join("; ")
        },
    })
}

/// Moments of the sampling errors at random feasible points of `problem`:
/// each sample mean within three standard errors of zero, and each mean
/// squared norm below `(1/p_min − 1)·C²` with the problem's `C_F`, `C_f`.
pub fn error_moment_suite(problem: &ProblemSpec, opts: &DiagOptions) -> Result<DiagOutcome> {
    let c = problem.constants();
    let cf = c.map_bound.unwrap_or(f64::INFINITY);
    let cg = c.subgrad_bound.unwrap_or(f64::INFINITY);
    let factor = 1.0 / problem.structure().p_min() - 1.0;
    let mut point_rng = substream(opts.seed, 0);
    let mut failures = Vec::new();
    let mut worst_mean = 0.0f64;
    let mut worst_msq = 0.0f64;
    for p in 0..opts.moment_points {
        let x = problem
            .sample_feasible(&mut point_rng)
            .ok_or(crate::error::Error::UnboundedSet)?;
        let mut rng = substream(opts.seed, 1 + p as u64);
        let m = rb_error_moments(problem, &x, opts.moment_draws, &mut rng)?;
        let zs = [
            norm(&m.mean_map) / m.stderr_map.max(f64::MIN_POSITIVE),
            norm(&m.mean_obj) / m.stderr_obj.max(f64::MIN_POSITIVE),
        ];
        let ratios = [m.msq_map / (factor * cf * cf), m.msq_obj / (factor * cg * cg)];
        worst_mean = worst_mean.max(zs[0]).max(zs[1]);
        worst_msq = worst_msq.max(ratios[0]).max(ratios[1]);
        let mean_ok = |z: f64, mean: &[f64]| z <= 3.0 || norm(mean) == 0.0;
        if !mean_ok(zs[0], &m.mean_map) || !mean_ok(zs[1], &m.mean_obj) {
            failures.push(format!("point {p}: mean/stderr = {:.2}, {:.2}", zs[0], zs[1]));
        }
        if ratios[0] > 1.0 || ratios[1] > 1.0 {
            failures.push(format!("point {p}: msq/bound = {:.3}, {:.3}", ratios[0], ratios[1]));
        }
    }
    Ok(DiagOutcome {
        name: format!("block sampling error moments ({})", problem.name()),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "{} points × {} draws; max ‖mean‖/stderr = {worst_mean:.2}, max msq/bound = {worst_msq:.3}",
                opts.moment_points, opts.moment_draws
            )
        } else {
            failures.join("; ")
        },
    })
}

/// Successive Tikhonov points along `η_k = (k+1)^{−0.3}` against
/// `(C̄_f/μ_f)|1 − η_{k−1}/η_k|`, with `C̄_f` the largest gradient norm over
/// the computed points.
pub fn tikhonov_step_suite(problem: &ProblemSpec, len: usize) -> Result<DiagOutcome> {
    let mu = problem.constants().strong_convexity.unwrap_or(0.0);
    let etas: Vec<f64> = (0..=len).map(|k| ((k + 1) as f64).powf(-0.3)).collect();
    let tol = 1e-12;
    let traj = tikhonov_trajectory(problem, &etas, tol)?;
    let cbar = max_subgradient_norm(problem, &traj);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for k in 1..=len {
        let step = dist(traj[k].as_slice(), traj[k - 1].as_slice());
        let bound = tikhonov_step_bound(cbar, mu, etas[k - 1], etas[k]);
        worst = worst.max(step / bound);
        if step > bound + 1e-9 {
            failures.push(format!("k={k}: {step:.3e} > {bound:.3e}"));
        }
    }
    Ok(DiagOutcome {
        name: format!("Tikhonov step bound ({})", problem.name()),
        passed: failures.is_empty() && mu > 0.0,
        detail: if failures.is_empty() {
            format!("{len} steps, C̄_f = {cbar:.4}, max step/bound = {worst:.3}")
        } else {
            failures.join("; ")
        },
    })
}

/// All suites with their default instances.
pub fn run_diagnostics(opts: &DiagOptions) -> Result<Vec<DiagOutcome>> {
    let cournot = paper_cournot_instance(opts.seed);
    Ok(vec![
        harmonic_suite()?,
        error_moment_suite(&cournot, opts)?,
        tikhonov_step_suite(&scalar_tikhonov_instance(), opts.trajectory_len)?,
        tikhonov_step_suite(&degenerate_face_instance(), opts.trajectory_len)?,
    ])
}
