//! Unbounded test beds with a strongly convex objective: `X = ℝⁿ₊`,
//! `F(x) = Qx + q` with `Q` symmetric positive semidefinite and
//! `f(x) = ½‖x − c‖²`. The reference point is the `f`-nearest solution of
//! the complementarity problem.

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::block::{check_len, BlockStructure};
use crate::error::{Error, Result};
use crate::maps::{AffineMap, FnMap, Matrix, SquaredDistance, ZeroMap};
use crate::problem::{ProblemConstants, ProblemSpec};
use crate::rng::rng_from_seed;
use crate::sets::SetDescriptor;

use super::oracle::lcp_least_distance_solution;

fn orthant_sets(structure: &BlockStructure) -> Vec<SetDescriptor> {
    structure
        .dims()
        .iter()
        .map(|&d| SetDescriptor::nonneg_orthant(d))
        .collect()
}

pub fn build_strongly_convex_unbounded(
    q_mat: Matrix,
    q: Vec<f64>,
    c: Vec<f64>,
    structure: BlockStructure,
) -> Result<ProblemSpec> {
    let n = structure.dim();
    check_len(n, q.len())?;
    check_len(n, c.len())?;
    if q_mat.rows() != n || q_mat.cols() != n {
        return Err(Error::InvalidProblem(format!("Q must be {n}×{n}")));
    }
    let qn = q_mat.to_nalgebra();
    if (&qn - qn.transpose()).amax() > 1e-12 * (1.0 + qn.amax()) {
        return Err(Error::InvalidProblem("Q must be symmetric".into()));
    }
    let eig = qn.symmetric_eigenvalues();
    let (lmin, lmax) = (eig.min(), eig.max());
    if lmin < -1e-10 * (1.0 + lmax.abs()) {
        return Err(Error::InvalidProblem(format!("Q has a negative eigenvalue {lmin:.3e}")));
    }
    let xstar = lcp_least_distance_solution(&q_mat, &q, &c, 1e-10)
        .ok_or_else(|| Error::InvalidProblem("complementarity problem has no solution".into()))?;
    let sets = orthant_sets(&structure);
    let p = ProblemSpec::new(
        "strongly-convex-orthant",
        structure,
        sets,
        Arc::new(AffineMap::new(q_mat, q)),
        Arc::new(SquaredDistance::new(c)),
    )?;
    let constants = ProblemConstants {
        strong_convexity: Some(1.0),
        objective_lipschitz: Some(1.0),
        map_lipschitz: Some(lmax.max(0.0)),
        map_strong_monotonicity: Some(lmin.max(0.0)),
        map_lipschitz_offset: Some(0.0),
        ..Default::default()
    };
    p.with_constants(constants).with_known_solution(xstar)
}

/// `F ≡ 0`: every point of `ℝⁿ₊` solves the VI and the reference point is
/// `max(c, 0)`.
pub fn build_zero_map_orthant(c: Vec<f64>, structure: BlockStructure) -> Result<ProblemSpec> {
    let n = structure.dim();
    check_len(n, c.len())?;
    let xstar: Vec<f64> = c.iter().map(|v| v.max(0.0)).collect();
    let sets = orthant_sets(&structure);
    let p = ProblemSpec::new(
        "zero-map-orthant",
        structure,
        sets,
        Arc::new(ZeroMap(n)),
        Arc::new(SquaredDistance::new(c)),
    )?;
    let constants = ProblemConstants {
        strong_convexity: Some(1.0),
        objective_lipschitz: Some(1.0),
        map_lipschitz: Some(0.0),
        map_strong_monotonicity: Some(0.0),
        ..Default::default()
    };
    p.with_constants(constants).with_known_solution(xstar)
}

/// Six variables in three blocks of two: `Q = LLᵀ/n + 0.5 I` with Gaussian
/// `L`, Gaussian `q` and `c`.
pub fn random_strongly_convex_instance(seed: u64) -> ProblemSpec {
    let n = 6;
    let mut rng = rng_from_seed(seed);
    let l: Vec<f64> = (0..n * n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let l = Matrix::new(n, n, l);
    let llt = l.matmul(&l.transpose());
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = llt.get(i, j) / n as f64 + if i == j { 0.5 } else { 0.0 };
        }
    }
    let q: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    build_strongly_convex_unbounded(
        Matrix::new(n, n, data),
        q,
        c,
        BlockStructure::equal_blocks(3, 2).expect("valid structure"),
    )
    .expect("positive definite instance")
    .with_name(format!("strongly-convex-orthant-seed{seed}"))
}

/// Three scalar blocks; the solution set is a ray `{(1/3, 1/3, t) : t ≥ 0}`
/// and `c = (0, 0, 1/2)` selects `x* = (1/3, 1/3, 1/2)`. Regularized
/// points are `x*_η = (1/(3+η), 1/(3+η), 1/2)`.
pub fn degenerate_face_instance() -> ProblemSpec {
    let q = Matrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 0.0]]);
    build_strongly_convex_unbounded(
        q,
        vec![-1.0, -1.0, 0.0],
        vec![0.0, 0.0, 0.5],
        BlockStructure::uniform(vec![1, 1, 1]).expect("valid structure"),
    )
    .expect("valid instance")
    .with_name("degenerate-face")
}

/// `F(x) = x − 1` on ℝ with `f(x) = ½x²`; `x*_η = 1/(1+η)` and `x* = 1`.
pub fn scalar_tikhonov_instance() -> ProblemSpec {
    let p = ProblemSpec::new(
        "scalar-tikhonov",
        BlockStructure::uniform(vec![1]).expect("valid structure"),
        vec![SetDescriptor::whole_space(1)],
        Arc::new(FnMap::new(1, |x: &[f64], o: &mut [f64]| o[0] = x[0] - 1.0)),
        Arc::new(SquaredDistance::origin(1)),
    )
    .expect("valid instance");
    p.with_constants(ProblemConstants {
        strong_convexity: Some(1.0),
        objective_lipschitz: Some(1.0),
        map_lipschitz: Some(1.0),
        map_strong_monotonicity: Some(1.0),
        ..Default::default()
    })
    .with_known_solution(vec![1.0])
    .expect("dimension 1")
}
