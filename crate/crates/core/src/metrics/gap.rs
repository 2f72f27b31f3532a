use serde::{Deserialize, Serialize};

use crate::block::{check_len, dot};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::rng::substream;

/// Budget of the dual gap estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GapEstimatorConfig {
    /// Random feasible probes.
    pub n_samples: usize,
    /// Independent projected-ascent runs.
    pub n_restarts: usize,
    pub ascent_iters: usize,
    /// Initial ascent step; it grows by 1.5 after an improving step and is
    /// halved otherwise.
    pub ascent_step: f64,
    pub seed: u64,
}

impl Default for GapEstimatorConfig {
    fn default() -> Self {
        Self {
            n_samples: 2000,
            n_restarts: 8,
            ascent_iters: 200,
            ascent_step: 1e-2,
            seed: 0x6761_7065_7374,
        }
    }
}

impl GapEstimatorConfig {
    pub fn reseeded(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 || self.n_restarts == 0 || self.ascent_iters == 0 {
            return Err(Error::Config("gap estimator counts must be at least 1".into()));
        }
        if !(self.ascent_step > 0.0) {
            return Err(Error::Config("gap estimator ascent_step must be positive".into()));
        }
        Ok(())
    }

    /// Settings as `key = value` pairs for trace metadata.
    pub fn describe(&self) -> Vec<(String, String)> {
        vec![
            ("gap_n_samples".into(), self.n_samples.to_string()),
            ("gap_n_restarts".into(), self.n_restarts.to_string()),
            ("gap_ascent_iters".into(), self.ascent_iters.to_string()),
            ("gap_ascent_step".into(), self.ascent_step.to_string()),
            ("gap_seed".into(), self.seed.to_string()),
        ]
    }
}

/// `ψ(y) = F(y)ᵀ(x − y)`.
pub fn gap_objective(problem: &ProblemSpec, x: &[f64], y: &[f64]) -> f64 {
    let fy = problem.eval_map(y);
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    dot(&fy, &diff)
}

/// Lower bound on `GAP(x) = sup_{y∈X} F(y)ᵀ(x − y)`.
///
/// The value is the largest `ψ(y)` found over `n_samples` uniform feasible
/// probes and `n_restarts` projected-ascent runs, floored at zero. Every
/// candidate is feasible, so the result never exceeds the true gap. Probes
/// and restart points come from separate streams: enlarging `n_samples`
/// with the other settings fixed can only raise the estimate.
pub fn dual_gap_estimate(problem: &ProblemSpec, x: &[f64], cfg: &GapEstimatorConfig) -> Result<f64> {
    check_len(problem.dim(), x.len())?;
    cfg.validate()?;
    if !problem.is_bounded() {
        return Err(Error::UnboundedSet);
    }
    let n = problem.dim();
    let mut best = 0.0f64;

    let mut probe_rng = substream(cfg.seed, 0);
    for _ in 0..cfg.n_samples {
        let y = problem.sample_feasible(&mut probe_rng).ok_or(Error::UnboundedSet)?;
        best = best.max(gap_objective(problem, x, &y));
    }

    let mut restart_rng = substream(cfg.seed, 1);
    let mut fy = vec![0.0; n];
    let mut diff = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut cand = vec![0.0; n];
    for _ in 0..cfg.n_restarts {
        let mut y = problem.sample_feasible(&mut restart_rng).ok_or(Error::UnboundedSet)?;
        let mut psi = gap_objective(problem, x, &y);
        best = best.max(psi);
        let mut step = cfg.ascent_step;
        for _ in 0..cfg.ascent_iters {
            // ∇ψ(y) = J_F(y)ᵀ(x − y) − F(y)
            problem.map().eval(&y, &mut fy);
            for j in 0..n {
                diff[j] = x[j] - y[j];
            }
            problem.map().jacobian_transpose_product(&y, &diff, &mut grad);
            for j in 0..n {
                trial[j] = y[j] + step * (grad[j] - fy[j]);
            }
            problem.project_into(&trial, &mut cand);
            let psi_new = gap_objective(problem, x, &cand);
            if psi_new.is_finite() && psi_new >= psi {
                std::mem::swap(&mut y, &mut cand);
                psi = psi_new;
                best = best.max(psi);
                step *= 1.5;
            } else {
                step *= 0.5;
                if step < 1e-300 {
                    break;
                }
            }
        }
    }
    Ok(best.max(0.0))
}
