//! Solver state and the weighted averaging recursion
//! `S_{k+1} = S_k + γ_{k+1}^r`, `x̄_{k+1} = (S_k x̄_k + γ_{k+1}^r x_{k+1}) / S_{k+1}`,
//! which keeps `x̄_N = Σ_k λ_{k,N} x_k` with `λ_{k,N} = γ_k^r / Σ_j γ_j^r`.

use crate::block::BlockVector;
use crate::rng::{rng_from_seed, SolverRng};

#[derive(Debug, Clone)]
pub struct SolverState {
    /// Number of completed iterations.
    pub k: u64,
    pub x: BlockVector,
    pub xbar: BlockVector,
    /// Running weight `S_k = Σ_{j≤k} γ_j^r`.
    pub weight_sum: f64,
    pub rng: SolverRng,
    /// Block evaluations of the pair (F_i, ∇_i f) performed so far.
    pub evals: u64,
}

impl SolverState {
    /// State at `k = 0`: `x̄₀ = x₀` and `S₀ = γ₀^r`.
    pub fn new(x0: BlockVector, gamma0: f64, r: f64, seed: u64) -> Self {
        Self::with_rng(x0, gamma0, r, rng_from_seed(seed))
    }

    pub fn with_rng(x0: BlockVector, gamma0: f64, r: f64, rng: SolverRng) -> Self {
        Self {
            k: 0,
            xbar: x0.clone(),
            x: x0,
            weight_sum: gamma0.powf(r),
            rng,
            evals: 0,
        }
    }

    /// Folds the current iterate `x` (already advanced to `x_{k+1}`) into the
    /// average with step size `gamma_next = γ_{k+1}`.
    pub fn update_average(&mut self, gamma_next: f64, r: f64) {
        let w = gamma_next.powf(r);
        let s_next = self.weight_sum + w;
        let t = w / s_next;
        for (xb, &xi) in self.xbar.as_mut_slice().iter_mut().zip(self.x.as_slice()) {
            *xb += t * (xi - *xb);
        }
        self.weight_sum = s_next;
    }
}
