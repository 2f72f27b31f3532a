//! `min ‖x‖₁` over `{Ax = b} ∩ box`, with the affine constraint expressed
//! through the VI of the penalty map `Aᵀ(Ax − b)`.

use std::sync::Arc;

use rand::Rng;

use crate::block::{check_len, norm, BlockStructure};
use crate::error::{Error, Result};
use crate::maps::{L1Norm, Matrix};
use crate::problem::{ProblemConstants, ProblemSpec};
use crate::rng::rng_from_seed;
use crate::sets::SetDescriptor;

use super::oracle::l1_box_oracle;
use super::penalized::PenalizedMap;

/// `max ‖Aᵀ(Ax − b)‖` over the box. The norm of an affine function is
/// convex, so the maximum sits at a vertex; boxes up to 20 coordinates are
/// enumerated, larger ones fall back to `‖A‖(‖A‖M + ‖b‖)`.
fn map_bound_over_box(a: &Matrix, b: &[f64], lower: &[f64], upper: &[f64]) -> f64 {
    let n = a.cols();
    if n > 20 {
        let s = a.spectral_norm();
        let m = lower
            .iter()
            .zip(upper)
            .map(|(l, u)| l.abs().max(u.abs()).powi(2))
            .sum::<f64>()
            .sqrt();
        return s * (s * m + norm(b));
    }
    let mut best: f64 = 0.0;
    let mut x = vec![0.0; n];
    let mut r = vec![0.0; a.rows()];
    let mut g = vec![0.0; n];
    for mask in 0u64..(1u64 << n) {
        for i in 0..n {
            x[i] = if mask >> i & 1 == 1 { upper[i] } else { lower[i] };
        }
        a.mul_vec(&x, &mut r);
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri -= bi);
        a.tr_mul_vec(&r, &mut g);
        best = best.max(norm(&g));
    }
    best
}

/// Builds the instance; the reference solution comes from
/// [`l1_box_oracle`]. Infeasible data are rejected.
pub fn build_l1_over_affine_box(
    a: Matrix,
    b: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    structure: BlockStructure,
) -> Result<ProblemSpec> {
    let n = structure.dim();
    check_len(n, a.cols())?;
    check_len(n, lower.len())?;
    check_len(n, upper.len())?;
    let (xstar, fstar) = l1_box_oracle(&a, &b, &lower, &upper).ok_or_else(|| {
        Error::InvalidProblem("{Ax = b} does not meet the box".into())
    })?;
    let sets = (0..structure.num_blocks())
        .map(|i| {
            let r = structure.range(i);
            SetDescriptor::boxed(lower[r.clone()].to_vec(), upper[r].to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    let map_bound = map_bound_over_box(&a, &b, &lower, &upper);
    let subgrad_bound = (n as f64).sqrt();
    let lipschitz = a.spectral_norm().powi(2);
    let map = PenalizedMap::new(a, b, vec![])?;
    let p = ProblemSpec::new("l1-affine-box", structure, sets, Arc::new(map), Arc::new(L1Norm(n)))?;
    let constants = ProblemConstants {
        map_bound: Some(map_bound),
        subgrad_bound: Some(subgrad_bound),
        map_lipschitz: Some(lipschitz),
        map_lipschitz_offset: Some(0.0),
        ..*p.constants()
    };
    Ok(p.with_constants(constants)
        .with_known_solution(xstar)?
        .with_optimal_value(fstar))
}

/// Eight variables in four blocks of two, box `[−1, 1]⁸`, and three random
/// equations `Ax = Ax̂` with `x̂` drawn inside the box.
pub fn random_l1_box_instance(seed: u64) -> ProblemSpec {
    random_l1_box_instance_sized(seed, 3, 8, 2)
}

pub fn random_l1_box_instance_sized(seed: u64, m: usize, n: usize, block_dim: usize) -> ProblemSpec {
    let mut rng = rng_from_seed(seed);
    let a = Matrix::new(m, n, (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect());
    let xhat: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    let mut b = vec![0.0; m];
    a.mul_vec(&xhat, &mut b);
    build_l1_over_affine_box(
        a,
        b,
        vec![-1.0; n],
        vec![1.0; n],
        BlockStructure::equal_blocks(n / block_dim, block_dim).expect("block_dim divides n"),
    )
    .expect("x̂ is feasible")
    .with_name(format!("l1-box-m{m}-n{n}-seed{seed}"))
}
