//! Fixed-step projection method `x ← P_X(x − ĝ G(x))` for the regularized
//! problems `VI(X, F + η R)`, with `R = ∇f` or `R = I`, and the Tikhonov
//! trajectory `η ↦ x*_η` built on it.
//!
//! For a `μ`-strongly monotone, `L`-Lipschitz map the step `ĝ = μ / L²`
//! makes the iteration a contraction with factor `√(1 − μ²/L²)`.

use crate::block::{norm, BlockVector};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;

/// Term added to `F` with weight `η`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularizer {
    /// `η ∇f(x)`.
    #[default]
    ObjectiveGradient,
    /// `η x`.
    Identity,
}

/// `G_η(x) = F(x) + η R(x)`.
#[derive(Debug, Clone, Copy)]
pub struct RegularizedMap<'a> {
    pub problem: &'a ProblemSpec,
    pub eta: f64,
    pub regularizer: Regularizer,
}

impl<'a> RegularizedMap<'a> {
    pub fn new(problem: &'a ProblemSpec, eta: f64, regularizer: Regularizer) -> Self {
        Self {
            problem,
            eta,
            regularizer,
        }
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) {
        self.problem.map().eval(x, out);
        if self.eta == 0.0 {
            return;
        }
        match self.regularizer {
            Regularizer::ObjectiveGradient => {
                scratch.resize(x.len(), 0.0);
                self.problem.objective().subgradient(x, scratch);
                for (o, g) in out.iter_mut().zip(scratch.iter()) {
                    *o += self.eta * g;
                }
            }
            Regularizer::Identity => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o += self.eta * xi;
                }
            }
        }
    }

    /// Block `i` of `G_η(x)`.
    pub fn eval_block(&self, x: &[f64], block: usize, out: &mut [f64], scratch: &mut Vec<f64>) {
        let range = self.problem.structure().range(block);
        self.problem.map().eval_block(x, range.clone(), out);
        match self.regularizer {
            Regularizer::ObjectiveGradient => {
                scratch.resize(range.len(), 0.0);
                self.problem
                    .objective()
                    .subgradient_block(x, range, scratch);
                for (o, g) in out.iter_mut().zip(scratch.iter()) {
                    *o += self.eta * g;
                }
            }
            Regularizer::Identity => {
                for (o, xi) in out.iter_mut().zip(&x[range]) {
                    *o += self.eta * xi;
                }
            }
        }
    }

    /// Strong monotonicity modulus `μ_η = μ_F + η μ_R`, if the problem
    /// supplies what is needed to certify it.
    pub fn strong_monotonicity(&self) -> Option<f64> {
        let c = self.problem.constants();
        let mu_map = c.map_strong_monotonicity.unwrap_or(0.0);
        let mu = match self.regularizer {
            Regularizer::ObjectiveGradient => mu_map + self.eta * c.strong_convexity.unwrap_or(0.0),
            Regularizer::Identity => mu_map + self.eta,
        };
        (mu > 0.0).then_some(mu)
    }

    /// Lipschitz constant `L_η = L_F + η L_R`.
    pub fn lipschitz(&self) -> Option<f64> {
        let c = self.problem.constants();
        let lf = c.map_lipschitz?;
        let lr = match self.regularizer {
            Regularizer::ObjectiveGradient => c.objective_lipschitz?,
            Regularizer::Identity => 1.0,
        };
        Some(lf + self.eta * lr)
    }

    /// The contraction step `μ_η / L_η²`.
    pub fn contraction_step(&self) -> Result<f64> {
        let mu = self.strong_monotonicity().ok_or_else(|| {
            Error::InvalidProblem(
                "regularized map is not certified strongly monotone (strong convexity modulus missing or zero)".into(),
            )
        })?;
        let l = self
            .lipschitz()
            .ok_or_else(|| Error::InvalidProblem("Lipschitz constants are missing".into()))?;
        Ok(mu / (l * l))
    }
}

/// State of a projection iteration; one [`advance`](Self::advance) costs one
/// full evaluation of the map.
#[derive(Debug, Clone)]
pub struct ProjectionIteration {
    pub x: Vec<f64>,
    g: Vec<f64>,
    trial: Vec<f64>,
    proj: Vec<f64>,
    scratch: Vec<f64>,
}

impl ProjectionIteration {
    pub fn new(x0: Vec<f64>) -> Self {
        let n = x0.len();
        Self {
            x: x0,
            g: vec![0.0; n],
            trial: vec![0.0; n],
            proj: vec![0.0; n],
            scratch: Vec::new(),
        }
    }

    /// Evaluates the map at the current point, returns the natural residual
    /// `‖x − P_X(x − G(x))‖` there and, unless it is already `≤ tol`, moves to
    /// `P_X(x − step·G(x))`.
    pub fn advance(&mut self, map: &RegularizedMap<'_>, step: f64, tol: f64) -> Result<f64> {
        let p = map.problem;
        map.eval(&self.x, &mut self.g, &mut self.scratch);
        if self.g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                source_name: "regularized map",
                iteration: 0,
            });
        }
        for i in 0..self.x.len() {
            self.trial[i] = self.x[i] - self.g[i];
        }
        p.project_into(&self.trial, &mut self.proj);
        let residual = self
            .x
            .iter()
            .zip(&self.proj)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if residual > tol {
            for i in 0..self.x.len() {
                self.trial[i] = self.x[i] - step * self.g[i];
            }
            p.project_into(&self.trial, &mut self.x);
        }
        Ok(residual)
    }
}

/// Result of an inner solve.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub x: BlockVector,
    pub residual: f64,
    /// Full map evaluations used.
    pub iterations: u64,
}

/// Projection method with an explicit step; stops once the natural residual
/// of `G_η` is `≤ tol`.
pub fn projection_method(
    map: &RegularizedMap<'_>,
    step: f64,
    tol: f64,
    max_iters: u64,
    x0: &[f64],
) -> Result<InnerSolution> {
    let p = map.problem;
    let mut it = ProjectionIteration::new(p.project(x0)?);
    let mut residual = f64::INFINITY;
    for iter in 0..max_iters {
        residual = it.advance(map, step, tol)?;
        if residual <= tol {
            return Ok(InnerSolution {
                x: BlockVector::new(p.structure().clone(), it.x)?,
                residual,
                iterations: iter + 1,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: max_iters,
        residual,
        tolerance: tol,
    })
}

/// Solves `VI(X, F + η R)` to natural residual `tol` with the contraction
/// step `μ_η / L_η²`, warm-started at `x0` (default: the origin projected
/// onto X).
pub fn solve_regularized_vi(
    problem: &ProblemSpec,
    eta: f64,
    regularizer: Regularizer,
    tol: f64,
    max_iters: u64,
    x0: Option<&[f64]>,
) -> Result<InnerSolution> {
    if !(eta > 0.0) {
        return Err(Error::InvalidProblem(format!("regularization weight {eta} must be positive")));
    }
    let map = RegularizedMap::new(problem, eta, regularizer);
    let step = map.contraction_step()?;
    let zeros = vec![0.0; problem.dim()];
    projection_method(&map, step, tol, max_iters, x0.unwrap_or(&zeros))
}

/// Point `x*_η` of the Tikhonov trajectory: the solution of
/// `VI(X, F + η ∇f)`.
pub fn tikhonov_point(problem: &ProblemSpec, eta: f64, tol: f64) -> Result<BlockVector> {
    tikhonov_point_from(problem, eta, tol, None)
}

pub fn tikhonov_point_from(
    problem: &ProblemSpec,
    eta: f64,
    tol: f64,
    warm_start: Option<&[f64]>,
) -> Result<BlockVector> {
    solve_regularized_vi(
        problem,
        eta,
        Regularizer::ObjectiveGradient,
        tol,
        50_000_000,
        warm_start,
    )
    .map(|s| s.x)
}

/// Trajectory points for a sequence of weights, each warm-started from the
/// previous one.
pub fn tikhonov_trajectory(problem: &ProblemSpec, etas: &[f64], tol: f64) -> Result<Vec<BlockVector>> {
    let mut out: Vec<BlockVector> = Vec::with_capacity(etas.len());
    for &eta in etas {
        let warm = out.last().map(|x| x.as_slice().to_vec());
        out.push(tikhonov_point_from(problem, eta, tol, warm.as_deref())?);
    }
    Ok(out)
}

/// Largest subgradient norm of `f` over a set of points.
pub fn max_subgradient_norm(problem: &ProblemSpec, points: &[BlockVector]) -> f64 {
    points
        .iter()
        .map(|x| norm(&problem.eval_subgradient(x.as_slice())))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::BlockStructure;
    use crate::maps::{FnMap, SquaredDistance, ZeroMap, ZeroObjective};
    use crate::problem::ProblemConstants;
    use crate::sets::SetDescriptor;
    use std::sync::Arc;

    fn shifted_identity() -> ProblemSpec {
        // F(x) = x − 1 on ℝ, f = ½x².
        ProblemSpec::new(
            "shifted-identity",
            BlockStructure::uniform(vec![1]).unwrap(),
            vec![SetDescriptor::whole_space(1)],
            Arc::new(FnMap::new(1, |x: &[f64], o: &mut [f64]| o[0] = x[0] - 1.0)),
            Arc::new(SquaredDistance::origin(1)),
        )
        .unwrap()
        .with_constants(ProblemConstants {
            map_lipschitz: Some(1.0),
            objective_lipschitz: Some(1.0),
            strong_convexity: Some(1.0),
            ..Default::default()
        })
    }

    #[test]
    fn zero_map_returns_objective_minimizer() {
        let c = vec![1.5, -2.0, 0.25];
        let p = ProblemSpec::new(
            "zero-map",
            BlockStructure::uniform(vec![2, 1]).unwrap(),
            vec![SetDescriptor::whole_space(2), SetDescriptor::whole_space(1)],
            Arc::new(ZeroMap(3)),
            Arc::new(SquaredDistance::new(c.clone())),
        )
        .unwrap()
        .with_constants(ProblemConstants {
            map_lipschitz: Some(0.0),
            objective_lipschitz: Some(1.0),
            strong_convexity: Some(1.0),
            ..Default::default()
        });
        for eta in [0.01, 1.0, 10.0] {
            let sol = solve_regularized_vi(&p, eta, Regularizer::ObjectiveGradient, 1e-10, 100_000, None).unwrap();
            for (a, b) in sol.x.as_slice().iter().zip(&c) {
                assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn identity_regularization_on_interval() {
        let p = ProblemSpec::new(
            "identity-interval",
            BlockStructure::uniform(vec![1]).unwrap(),
            vec![SetDescriptor::uniform_box(1, 1.0, 2.0).unwrap()],
            Arc::new(FnMap::new(1, |x: &[f64], o: &mut [f64]| o[0] = x[0])),
            Arc::new(ZeroObjective(1)),
        )
        .unwrap()
        .with_constants(ProblemConstants {
            map_lipschitz: Some(1.0),
            ..Default::default()
        });
        let sol = solve_regularized_vi(&p, 1.0, Regularizer::Identity, 1e-12, 10_000, Some(&[2.0])).unwrap();
        assert_eq!(sol.x.as_slice(), &[1.0]);
    }

    #[test]
    fn closed_form_tikhonov_point() {
        let p = shifted_identity();
        let x = tikhonov_point(&p, 1.0, 1e-12).unwrap();
        assert!((x.as_slice()[0] - 0.5).abs() <= 1e-11);
        let x = tikhonov_point(&p, 0.25, 1e-12).unwrap();
        assert!((x.as_slice()[0] - 0.8).abs() <= 1e-11);
    }

    #[test]
    fn residual_decreases_monotonically() {
        let p = shifted_identity();
        let map = RegularizedMap::new(&p, 0.3, Regularizer::ObjectiveGradient);
        let step = map.contraction_step().unwrap();
        let mut it = ProjectionIteration::new(vec![25.0]);
        let mut prev = f64::INFINITY;
        for _ in 0..500 {
            let r = it.advance(&map, step, 0.0).unwrap();
            assert!(r <= prev + 1e-14);
            prev = r;
        }
    }

    #[test]
    fn missing_strong_convexity_is_an_error() {
        let p = ProblemSpec::new(
            "no-constants",
            BlockStructure::uniform(vec![1]).unwrap(),
            vec![SetDescriptor::whole_space(1)],
            Arc::new(ZeroMap(1)),
            Arc::new(ZeroObjective(1)),
        )
        .unwrap();
        assert!(matches!(
            solve_regularized_vi(&p, 1.0, Regularizer::ObjectiveGradient, 1e-8, 10, None),
            Err(Error::InvalidProblem(_))
        ));
    }

    #[test]
    fn not_converged_reports_last_residual() {
        let p = shifted_identity();
        match solve_regularized_vi(&p, 1e-3, Regularizer::ObjectiveGradient, 1e-14, 3, Some(&[100.0])) {
            Err(Error::NotConverged { iterations, residual, .. }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 1.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
