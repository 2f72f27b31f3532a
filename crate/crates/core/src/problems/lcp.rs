//! Complementarity problems `x ≥ 0, F(x) ≥ 0, xᵀF(x) = 0`, posed as
//! `VI(ℝⁿ₊, F)`.

use std::sync::Arc;

use crate::block::BlockStructure;
use crate::error::Result;
use crate::maps::{AffineMap, Matrix};
use crate::problem::{Mapping, Objective, ProblemConstants, ProblemSpec};
use crate::sets::SetDescriptor;

pub fn build_lcp(
    map: Arc<dyn Mapping>,
    structure: BlockStructure,
    objective: Arc<dyn Objective>,
) -> Result<ProblemSpec> {
    let sets = structure
        .dims()
        .iter()
        .map(|&d| SetDescriptor::nonneg_orthant(d))
        .collect();
    ProblemSpec::new("lcp", structure, sets, map, objective)
}

/// `F(x) = Qx + q` with scalar blocks. Lipschitz and monotonicity moduli
/// are taken from the symmetric part of `Q`.
pub fn affine_lcp(q_mat: Matrix, q: Vec<f64>, objective: Arc<dyn Objective>) -> Result<ProblemSpec> {
    let n = q.len();
    let lipschitz = q_mat.spectral_norm();
    let sym = q_mat.to_nalgebra();
    let sym = (&sym + sym.transpose()) * 0.5;
    let mu = sym.symmetric_eigenvalues().min().max(0.0);
    let p = build_lcp(
        Arc::new(AffineMap::new(q_mat, q)),
        BlockStructure::uniform(vec![1; n])?,
        objective,
    )?;
    let constants = ProblemConstants {
        map_lipschitz: Some(lipschitz),
        map_strong_monotonicity: Some(mu),
        ..*p.constants()
    };
    Ok(p.with_constants(constants))
}

/// Largest violation of `x ≥ 0`, `F(x) ≥ 0` and `|xᵀF(x)| = 0`.
pub fn complementarity_violation(problem: &ProblemSpec, x: &[f64]) -> (f64, f64, f64) {
    let f = problem.eval_map(x);
    let neg_x = x.iter().fold(0.0f64, |m, v| m.max(-v));
    let neg_f = f.iter().fold(0.0f64, |m, v| m.max(-v));
    let comp = crate::block::dot(x, &f).abs();
    (neg_x, neg_f, comp)
}
