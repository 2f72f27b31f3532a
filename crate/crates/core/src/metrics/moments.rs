use rand::Rng;

use crate::block::{check_len, norm};
use crate::error::Result;
use crate::problem::ProblemSpec;

/// Monte Carlo moments of the block-sampling errors
/// `Δ = F(x) − p_i⁻¹ E_i F_i(x)` and `δ = ∇̃f(x) − p_i⁻¹ E_i ∇̃_i f(x)`, where
/// `E_i` embeds block `i` into ℝⁿ with zeros elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorMoments {
    pub draws: usize,
    pub mean_map: Vec<f64>,
    pub mean_obj: Vec<f64>,
    /// Sample mean of `‖Δ‖²`.
    pub msq_map: f64,
    pub msq_obj: f64,
    /// `sqrt(Σ_j s_j² / n)`: the standard error scale of `‖mean Δ‖`.
    pub stderr_map: f64,
    pub stderr_obj: f64,
}

/// Accumulates one error vector per draw with Welford updates.
struct Welford {
    mean: Vec<f64>,
    m2: Vec<f64>,
    sq_norm_sum: f64,
    n: usize,
}

impl Welford {
    fn new(dim: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            m2: vec![0.0; dim],
            sq_norm_sum: 0.0,
            n: 0,
        }
    }

    fn push(&mut self, v: &[f64]) {
        self.n += 1;
        let n = self.n as f64;
        for ((m, s), x) in self.mean.iter_mut().zip(&mut self.m2).zip(v) {
            let delta = x - *m;
            *m += delta / n;
            *s += delta * (x - *m);
        }
        self.sq_norm_sum += v.iter().map(|x| x * x).sum::<f64>();
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        (self.m2.iter().sum::<f64>() / (n - 1.0) / n).sqrt()
    }
}

fn sampling_error(full: &[f64], problem: &ProblemSpec, i: usize, out: &mut [f64]) {
    let range = problem.structure().range(i);
    let p = problem.structure().prob(i);
    out.copy_from_slice(full);
    for j in range {
        out[j] = full[j] - full[j] / p;
    }
}

pub fn rb_error_moments<R: Rng + ?Sized>(
    problem: &ProblemSpec,
    x: &[f64],
    n_draws: usize,
    rng: &mut R,
) -> Result<ErrorMoments> {
    check_len(problem.dim(), x.len())?;
    let n = problem.dim();
    let fx = problem.eval_map(x);
    let gx = problem.eval_subgradient(x);
    let mut acc_f = Welford::new(n);
    let mut acc_g = Welford::new(n);
    let mut buf = vec![0.0; n];
    for _ in 0..n_draws.max(1) {
        let i = problem.structure().sample_block(rng);
        sampling_error(&fx, problem, i, &mut buf);
        acc_f.push(&buf);
        sampling_error(&gx, problem, i, &mut buf);
        acc_g.push(&buf);
    }
    let draws = acc_f.n;
    Ok(ErrorMoments {
        draws,
        msq_map: acc_f.sq_norm_sum / draws as f64,
        msq_obj: acc_g.sq_norm_sum / draws as f64,
        stderr_map: acc_f.stderr(),
        stderr_obj: acc_g.stderr(),
        mean_map: acc_f.mean,
        mean_obj: acc_g.mean,
    })
}

/// Exact expectations obtained by enumerating the blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactErrorMoments {
    pub mean_map: Vec<f64>,
    pub mean_obj: Vec<f64>,
    pub msq_map: f64,
    pub msq_obj: f64,
}

pub fn exact_error_moments(problem: &ProblemSpec, x: &[f64]) -> Result<ExactErrorMoments> {
    check_len(problem.dim(), x.len())?;
    let n = problem.dim();
    let fx = problem.eval_map(x);
    let gx = problem.eval_subgradient(x);
    let mut out = ExactErrorMoments {
        mean_map: vec![0.0; n],
        mean_obj: vec![0.0; n],
        msq_map: 0.0,
        msq_obj: 0.0,
    };
    let mut buf = vec![0.0; n];
    for i in 0..problem.num_blocks() {
        let p = problem.structure().prob(i);
        sampling_error(&fx, problem, i, &mut buf);
        out.mean_map.iter_mut().zip(&buf).for_each(|(m, v)| *m += p * v);
        out.msq_map += p * norm(&buf).powi(2);
        sampling_error(&gx, problem, i, &mut buf);
        out.mean_obj.iter_mut().zip(&buf).for_each(|(m, v)| *m += p * v);
        out.msq_obj += p * norm(&buf).powi(2);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::BlockStructure;
    use crate::maps::{FnMap, SquaredDistance};
    use crate::rng::rng_from_seed;
    use crate::sets::SetDescriptor;
    use std::sync::Arc;

    fn problem(dims: Vec<usize>, probs: Vec<f64>) -> ProblemSpec {
        let n: usize = dims.iter().sum();
        let sets = dims.iter().map(|&d| SetDescriptor::uniform_box(d, -1.0, 1.0).unwrap()).collect();
        ProblemSpec::new(
            "moments",
            BlockStructure::new(dims, probs).unwrap(),
            sets,
            Arc::new(FnMap::new(n, |x: &[f64], o: &mut [f64]| {
                for (i, v) in o.iter_mut().enumerate() {
                    *v = x[i] + 0.3 * (i as f64) - 0.5;
                }
            })),
            Arc::new(SquaredDistance::new(vec![0.2; n])),
        )
        .unwrap()
    }

    #[test]
    fn single_block_has_no_error() {
        let p = problem(vec![3], vec![1.0]);
        let m = rb_error_moments(&p, &[0.1, 0.2, 0.3], 100, &mut rng_from_seed(1)).unwrap();
        assert!(m.mean_map.iter().chain(&m.mean_obj).all(|v| *v == 0.0));
        assert_eq!((m.msq_map, m.msq_obj), (0.0, 0.0));
    }

    #[test]
    fn two_blocks_mean_zero_exactly() {
        let p = problem(vec![1, 2], vec![0.5, 0.5]);
        let x = [0.4, -0.3, 0.9];
        let e = exact_error_moments(&p, &x).unwrap();
        assert!(e.mean_map.iter().chain(&e.mean_obj).all(|v| v.abs() < 1e-15));
        // Uniform sampling attains (1/p_min − 1)‖F‖².
        let f2 = norm(&p.eval_map(&x)).powi(2);
        assert!((e.msq_map - f2).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_matches_exact() {
        let p = problem(vec![1, 1, 2], vec![0.2, 0.3, 0.5]);
        let x = [0.1, -0.7, 0.5, 0.0];
        let e = exact_error_moments(&p, &x).unwrap();
        let m = rb_error_moments(&p, &x, 200_000, &mut rng_from_seed(4)).unwrap();
        assert!(norm(&m.mean_map) <= 4.0 * m.stderr_map);
        assert!((m.msq_map - e.msq_map).abs() / e.msq_map < 0.02);
        let bound = (1.0 / 0.2 - 1.0) * norm(&p.eval_map(&x)).powi(2);
        assert!(e.msq_map <= bound);
    }
}
