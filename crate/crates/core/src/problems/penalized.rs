//! Convex programs `min f(x)` s.t. `Ax = b`, `h_j(x) ≤ 0`, `x ∈ X` recast as
//! VI constraints through the penalty map
//!
//! ```text
//! F(x) = Aᵀ(Ax − b) + Σ_j max{0, h_j(x)} ∇h_j(x),
//! ```
//!
//! the gradient of `φ(x) = ½‖Ax − b‖² + ½ Σ_j max{0, h_j(x)}²`. When the
//! program is feasible, `SOL(X, F) = argmin_X φ` is exactly its feasible set.

use std::sync::Arc;

use rand::Rng;

use crate::block::{check_len, dist, dot, norm, BlockStructure};
use crate::error::{Error, Result};
use crate::maps::{Matrix, ZeroObjective};
use crate::problem::{Mapping, Objective, ProblemConstants, ProblemSpec};
use crate::rng::rng_from_seed;
use crate::sets::SetDescriptor;

/// A continuously differentiable convex constraint function.
pub trait ConvexConstraint: Send + Sync + std::fmt::Debug {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    /// `∇²h(x) v`.
    fn hessian_product(&self, x: &[f64], v: &[f64], out: &mut [f64]);
    /// Lipschitz constant of `max{0, h}∇h` on `{‖x‖ ≤ radius}`.
    fn penalty_lipschitz(&self, radius: f64) -> f64;
}

/// `aᵀx − c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub a: Vec<f64>,
    pub c: f64,
}

impl ConvexConstraint for LinearConstraint {
    fn value(&self, x: &[f64]) -> f64 {
        dot(&self.a, x) - self.c
    }

    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.a);
    }

    fn hessian_product(&self, _x: &[f64], _v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }

    fn penalty_lipschitz(&self, _radius: f64) -> f64 {
        dot(&self.a, &self.a)
    }
}

/// `‖x − center‖² − radius²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallConstraint {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl ConvexConstraint for BallConstraint {
    fn value(&self, x: &[f64]) -> f64 {
        let d = dist(x, &self.center);
        d * d - self.radius * self.radius
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        for ((o, xi), ci) in out.iter_mut().zip(x).zip(&self.center) {
            *o = 2.0 * (xi - ci);
        }
    }

    fn hessian_product(&self, _x: &[f64], v: &[f64], out: &mut [f64]) {
        out.iter_mut().zip(v).for_each(|(o, vi)| *o = 2.0 * vi);
    }

    fn penalty_lipschitz(&self, radius: f64) -> f64 {
        // Jacobian 2h·I + 4(x−c)(x−c)ᵀ on {h > 0}, with ‖x − c‖ ≤ R.
        let r = radius + norm(&self.center);
        2.0 * (r * r - self.radius * self.radius).max(0.0) + 4.0 * r * r
    }
}

#[derive(Debug, Clone)]
pub struct PenalizedMap {
    a: Matrix,
    b: Vec<f64>,
    constraints: Vec<Arc<dyn ConvexConstraint>>,
}

impl PenalizedMap {
    pub fn new(a: Matrix, b: Vec<f64>, constraints: Vec<Arc<dyn ConvexConstraint>>) -> Result<Self> {
        check_len(a.rows(), b.len())?;
        Ok(Self { a, b, constraints })
    }

    /// `φ(x)`, whose gradient is the map.
    pub fn potential(&self, x: &[f64]) -> f64 {
        let mut r = vec![0.0; self.a.rows()];
        self.a.mul_vec(x, &mut r);
        let lin: f64 = r.iter().zip(&self.b).map(|(ax, b)| (ax - b).powi(2)).sum();
        let pen: f64 = self
            .constraints
            .iter()
            .map(|h| h.value(x).max(0.0).powi(2))
            .sum();
        0.5 * (lin + pen)
    }

    /// Lipschitz constant of the map on `{‖x‖ ≤ radius}`.
    pub fn lipschitz(&self, radius: f64) -> f64 {
        let s = self.a.spectral_norm();
        s * s
            + self
                .constraints
                .iter()
                .map(|h| h.penalty_lipschitz(radius))
                .sum::<f64>()
    }

    pub fn equality_residual(&self, x: &[f64]) -> f64 {
        let mut r = vec![0.0; self.a.rows()];
        self.a.mul_vec(x, &mut r);
        dist(&r, &self.b)
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|h| h.value(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

impl Mapping for PenalizedMap {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let mut r = vec![0.0; self.a.rows()];
        self.a.mul_vec(x, &mut r);
        r.iter_mut().zip(&self.b).for_each(|(ri, bi)| *ri -= bi);
        self.a.tr_mul_vec(&r, out);
        let mut g = vec![0.0; x.len()];
        for h in &self.constraints {
            let v = h.value(x);
            if v > 0.0 {
                h.gradient(x, &mut g);
                out.iter_mut().zip(&g).for_each(|(o, gi)| *o += v * gi);
            }
        }
    }

    /// The Jacobian is symmetric: `AᵀA + Σ_{h_j > 0} (∇h_j∇h_jᵀ + h_j∇²h_j)`.
    fn jacobian_transpose_product(&self, x: &[f64], v: &[f64], out: &mut [f64]) {
        let mut av = vec![0.0; self.a.rows()];
        self.a.mul_vec(v, &mut av);
        self.a.tr_mul_vec(&av, out);
        let mut g = vec![0.0; x.len()];
        let mut hv = vec![0.0; x.len()];
        for h in &self.constraints {
            let val = h.value(x);
            if val > 0.0 {
                h.gradient(x, &mut g);
                h.hessian_product(x, v, &mut hv);
                let gv = dot(&g, v);
                for j in 0..out.len() {
                    out[j] += gv * g[j] + val * hv[j];
                }
            }
        }
    }
}

/// Penalized program over `X = Π sets`. The returned problem carries the
/// map's Lipschitz constant when X is bounded.
pub fn build_penalized_program(
    a: Matrix,
    b: Vec<f64>,
    constraints: Vec<Arc<dyn ConvexConstraint>>,
    structure: BlockStructure,
    sets: Vec<SetDescriptor>,
    objective: Arc<dyn Objective>,
) -> Result<ProblemSpec> {
    check_len(structure.dim(), a.cols())?;
    let map = PenalizedMap::new(a, b, constraints)?;
    let lipschitz = |m: f64| map.lipschitz(m);
    let p = ProblemSpec::new("penalized", structure, sets, Arc::new(map.clone()), objective)?;
    let constants = ProblemConstants {
        map_lipschitz: p.constants().norm_bound.map(lipschitz),
        ..Default::default()
    };
    Ok(p.with_constants(constants))
}

/// Result of [`solve_penalized`].
#[derive(Debug, Clone)]
pub struct PenalizedSolution {
    pub x: Vec<f64>,
    pub natural_residual: f64,
    pub iterations: u64,
}

/// Projected gradient descent on `φ` with step `1/L`, stopped on the natural
/// residual `‖x − P_X(x − F(x))‖ ≤ tol`.
pub fn solve_penalized(problem: &ProblemSpec, x0: &[f64], tol: f64, max_iters: u64) -> Result<PenalizedSolution> {
    let l = problem
        .constants()
        .map_lipschitz
        .ok_or_else(|| Error::MissingReference("Lipschitz constant of the penalty map".into()))?;
    let step = 1.0 / l.max(1e-12);
    let n = problem.dim();
    let mut x = problem.project(x0)?;
    let mut trial = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 0..max_iters {
        let f = problem.eval_map(&x);
        for j in 0..n {
            trial[j] = x[j] - f[j];
        }
        problem.project_into(&trial, &mut next);
        residual = dist(&x, &next);
        if residual <= tol {
            return Ok(PenalizedSolution {
                x,
                natural_residual: residual,
                iterations: it,
            });
        }
        for j in 0..n {
            trial[j] = x[j] - step * f[j];
        }
        problem.project_into(&trial, &mut next);
        std::mem::swap(&mut x, &mut next);
    }
    Err(Error::NotConverged {
        iterations: max_iters,
        residual,
        tolerance: tol,
    })
}

/// A random feasible program together with the map used to audit it.
#[derive(Debug, Clone)]
pub struct RandomProgram {
    pub problem: ProblemSpec,
    pub map: PenalizedMap,
    /// The feasible point the data were built around.
    pub anchor: Vec<f64>,
}

/// Random feasible instance: `n ∈ [2, 6]`, `m ∈ [1, min(3, n−1)]`,
/// up to two constraints (a ball and a half-space) that are strictly
/// satisfied at an anchor point, and `X = [−2, 2]ⁿ` split into scalar
/// blocks.
pub fn random_penalized_program(seed: u64) -> RandomProgram {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(2..=6usize);
    let m = rng.random_range(1..=3usize.min(n - 1));
    let a = Matrix::new(m, n, (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect());
    let anchor: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    let mut b = vec![0.0; m];
    a.mul_vec(&anchor, &mut b);

    let mut constraints: Vec<Arc<dyn ConvexConstraint>> = Vec::new();
    let count = rng.random_range(0..=2usize);
    if count >= 1 {
        let center: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let radius = dist(&anchor, &center) + rng.random_range(0.1..0.5);
        constraints.push(Arc::new(BallConstraint { center, radius }));
    }
    if count == 2 {
        let a_h: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let c = dot(&a_h, &anchor) + rng.random_range(0.05..0.3);
        constraints.push(Arc::new(LinearConstraint { a: a_h, c }));
    }
    let map = PenalizedMap::new(a.clone(), b.clone(), constraints.clone()).expect("consistent shapes");
    let problem = build_penalized_program(
        a,
        b,
        constraints,
        BlockStructure::uniform(vec![1; n]).expect("valid structure"),
        (0..n)
            .map(|_| SetDescriptor::uniform_box(1, -2.0, 2.0).expect("valid box"))
            .collect(),
        Arc::new(ZeroObjective(n)),
    )
    .expect("consistent data")
    .with_name(format!("penalized-random-{seed}"));
    RandomProgram { problem, map, anchor }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: Matrix, b: Vec<f64>, h: Vec<Arc<dyn ConvexConstraint>>) -> ProblemSpec {
        build_penalized_program(
            a,
            b,
            h,
            BlockStructure::uniform(vec![1]).unwrap(),
            vec![SetDescriptor::whole_space(1)],
            Arc::new(ZeroObjective(1)),
        )
        .unwrap()
    }

    #[test]
    fn least_squares_part_is_identity() {
        let p = scalar(Matrix::identity(1), vec![0.0], vec![]);
        assert_eq!(p.eval_map(&[3.0]), vec![3.0]);
    }

    #[test]
    fn hinge_part_vanishes_on_feasible_side() {
        let h: Arc<dyn ConvexConstraint> = Arc::new(LinearConstraint { a: vec![1.0], c: 1.0 });
        let p = scalar(Matrix::zeros(0, 1), vec![], vec![h]);
        assert_eq!(p.eval_map(&[0.3]), vec![0.0]);
        assert_eq!(p.eval_map(&[1.0]), vec![0.0]);
        assert_eq!(p.eval_map(&[2.5]), vec![1.5]);
    }

    #[test]
    fn rank_deficient_system_reaches_feasibility() {
        let mut rng = rng_from_seed(2);
        let r1: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r2: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r3: Vec<f64> = r1.iter().zip(&r2).map(|(a, b)| a - 2.0 * b).collect();
        let a = Matrix::from_rows(&[r1, r2, r3]);
        let xhat: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut b = vec![0.0; 3];
        a.mul_vec(&xhat, &mut b);
        let p = build_penalized_program(
            a.clone(),
            b.clone(),
            vec![],
            BlockStructure::uniform(vec![2, 3]).unwrap(),
            vec![
                SetDescriptor::uniform_box(2, -2.0, 2.0).unwrap(),
                SetDescriptor::uniform_box(3, -2.0, 2.0).unwrap(),
            ],
            Arc::new(ZeroObjective(5)),
        )
        .unwrap();
        let sol = solve_penalized(&p, &[0.0; 5], 1e-8, 1_000_000).unwrap();
        let map = PenalizedMap::new(a, b, vec![]).unwrap();
        assert!(map.equality_residual(&sol.x) <= 1e-6);
    }

    #[test]
    fn exact_jacobian_product() {
        for seed in 0..10 {
            let prog = random_penalized_program(seed);
            let n = prog.anchor.len();
            let x: Vec<f64> = prog.anchor.iter().map(|v| v + 1.3).collect();
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
            let mut exact = vec![0.0; n];
            prog.map.jacobian_transpose_product(&x, &v, &mut exact);
            let mut fd = vec![0.0; n];
            crate::maps::FnMap::new(n, |x: &[f64], o: &mut [f64]| prog.map.eval(x, o))
                .jacobian_transpose_product(&x, &v, &mut fd);
            for (a, b) in exact.iter().zip(&fd) {
                assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn potential_gradient_matches_map() {
        let prog = random_penalized_program(7);
        let x: Vec<f64> = prog.anchor.iter().map(|v| v + 0.9).collect();
        let f = prog.problem.eval_map(&x);
        for j in 0..x.len() {
            let h = 1e-6;
            let mut xp = x.clone();
            xp[j] += h;
            let mut xm = x.clone();
            xm[j] -= h;
            let fd = (prog.map.potential(&xp) - prog.map.potential(&xm)) / (2.0 * h);
            assert!((fd - f[j]).abs() <= 1e-6 * (1.0 + f[j].abs()));
        }
    }
}
