//! Sequential regularization baseline: an outer loop over a decreasing
//! sequence `η_t` that solves each `VI(X, F + η_t R)` with the projection
//! method, warm-started from the previous solution.

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::rng::rng_from_seed;

use super::projection::{ProjectionIteration, RegularizedMap, Regularizer};
use super::trace::{Recorder, RunOptions, RunStatus, RunTrace, TraceMeta};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrConfig {
    pub eta0: f64,
    /// Decay factor, `η_{t+1} = ρ η_t`.
    pub rho: f64,
    /// Number of outer steps; `None` runs until the budget ends.
    pub max_outer: Option<u64>,
    pub regularizer: Regularizer,
    /// Inner tolerance `max(tol_floor, tol_factor · η_t)`.
    pub tol_floor: f64,
    pub tol_factor: f64,
    /// Cap on inner iterations per outer step.
    pub inner_max_iters: u64,
    /// Floor for `η_t`; keeps long runs away from a degenerate inner problem.
    pub eta_min: f64,
}

impl SrConfig {
    pub fn new(eta0: f64) -> Self {
        Self {
            eta0,
            rho: 0.5,
            max_outer: None,
            regularizer: Regularizer::ObjectiveGradient,
            tol_floor: 1e-8,
            tol_factor: 0.1,
            inner_max_iters: 100_000,
            eta_min: 1e-12,
        }
    }

    pub fn with_regularizer(mut self, regularizer: Regularizer) -> Self {
        self.regularizer = regularizer;
        self
    }

    pub fn with_outer_steps(mut self, t: u64) -> Self {
        self.max_outer = Some(t);
        self
    }

    pub fn inner_tolerance(&self, eta: f64) -> f64 {
        self.tol_floor.max(self.tol_factor * eta)
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta0 > 0.0) {
            return Err(Error::Config(format!("SR eta0 = {} must be positive", self.eta0)));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Config(format!("SR rho = {} must lie in (0, 1)", self.rho)));
        }
        if !(self.eta_min > 0.0 && self.eta_min <= self.eta0) {
            return Err(Error::Config(format!("SR eta_min = {} must lie in (0, eta0]", self.eta_min)));
        }
        if self.inner_max_iters == 0 {
            return Err(Error::Config("SR inner_max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Runs the baseline. Steps are full map evaluations (each worth `d` block
/// evaluations); snapshots are taken at the current iterate.
pub fn run_sr(problem: &ProblemSpec, cfg: &SrConfig, opts: &RunOptions) -> Result<RunTrace> {
    cfg.validate()?;
    let mut rng = rng_from_seed(opts.seed);
    let x0 = problem.initial_point(&opts.initial, &mut rng)?;
    let d = problem.num_blocks() as u64;

    let max_steps = opts.budget.max_steps(1.0);
    if max_steps.is_none() && opts.budget.max_wall.is_none() && cfg.max_outer.is_none() {
        return Err(Error::Config("budget has no limit".into()));
    }
    let mut cursor = opts.checkpoints.resolve(max_steps);
    let mut recorder = Recorder::new(problem, opts);
    let mut records = Vec::new();
    let mut status = RunStatus::Completed;

    let mut it = ProjectionIteration::new(x0.into_inner());
    let mut steps = 0u64;
    let mut eta = cfg.eta0;
    let mut outer = 0u64;
    let mut inner_failures = 0u64;

    'outer: while cfg.max_outer.is_none_or(|t| outer < t) {
        let map = RegularizedMap::new(problem, eta, cfg.regularizer);
        let step = map.contraction_step()?;
        let tol = cfg.inner_tolerance(eta);
        let mut inner = 0u64;
        loop {
            if cursor.due(steps) {
                records.push(recorder.record(steps, steps * d, &it.x)?);
            }
            if max_steps.is_some_and(|m| steps >= m) || recorder.wall_exceeded() {
                break 'outer;
            }
            let residual = match it.advance(&map, step, tol) {
                Ok(r) => r,
                Err(e @ Error::NonFinite { .. }) => {
                    status = RunStatus::Aborted(e.to_string());
                    break 'outer;
                }
                Err(e) => return Err(e),
            };
            steps += 1;
            inner += 1;
            if residual <= tol {
                break;
            }
            if inner >= cfg.inner_max_iters {
                inner_failures += 1;
                break;
            }
        }
        eta = (eta * cfg.rho).max(cfg.eta_min);
        outer += 1;
    }

    if opts.record_final
        && status == RunStatus::Completed
        && records.last().is_none_or(|r| r.k != steps)
    {
        records.push(recorder.record(steps, steps * d, &it.x)?);
    }

    let settings = vec![
        ("eta0".to_string(), cfg.eta0.to_string()),
        ("rho".to_string(), cfg.rho.to_string()),
        ("regularizer".to_string(), format!("{:?}", cfg.regularizer)),
        ("inner_tol".to_string(), format!("max({}, {}*eta_t)", cfg.tol_floor, cfg.tol_factor)),
        ("inner_method".to_string(), "projection, step mu/L^2, warm start".to_string()),
        ("outer_steps".to_string(), outer.to_string()),
        ("inner_failures".to_string(), inner_failures.to_string()),
        ("final_eta".to_string(), eta.to_string()),
    ];
    let final_x = it.x;
    Ok(RunTrace {
        meta: TraceMeta {
            solver: "sr".into(),
            problem: problem.name().to_string(),
            seed: opts.seed,
            settings,
        },
        records,
        status,
        final_point: final_x.clone(),
        final_x,
    })
}
