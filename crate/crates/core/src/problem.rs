//! The problem model: a block structure, one feasible set per block, the
//! monotone map `F` of the variational inequality and the objective `f`.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use rand::Rng;

use crate::block::{check_len, norm, BlockStructure, BlockVector};
use crate::error::{Error, Result};
use crate::sets::SetDescriptor;

/// A deterministic map `F: ℝⁿ → ℝⁿ`.
pub trait Mapping: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64], out: &mut [f64]);

    /// Components `range` of `F(x)`. Implementations overriding this must
    /// produce bitwise the same values as the full evaluation.
    fn eval_block(&self, x: &[f64], range: Range<usize>, out: &mut [f64]) {
        let mut full = vec![0.0; self.dim()];
        self.eval(x, &mut full);
        out.copy_from_slice(&full[range]);
    }

    /// `J_F(x)ᵀ v`. The default uses central differences.
    fn jacobian_transpose_product(&self, x: &[f64], v: &[f64], out: &mut [f64]) {
        let n = self.dim();
        let mut xp = x.to_vec();
        let mut fp = vec![0.0; n];
        let mut fm = vec![0.0; n];
        for j in 0..n {
            let h = 1e-6 * (1.0 + x[j].abs());
            xp[j] = x[j] + h;
            self.eval(&xp, &mut fp);
            xp[j] = x[j] - h;
            self.eval(&xp, &mut fm);
            xp[j] = x[j];
            out[j] = fp
                .iter()
                .zip(&fm)
                .zip(v)
                .map(|((a, b), vi)| (a - b) / (2.0 * h) * vi)
                .sum();
        }
    }
}

/// A convex objective with a deterministic subgradient oracle.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn subgradient(&self, x: &[f64], out: &mut [f64]);

    /// Components `range` of the subgradient returned by
    /// [`subgradient`](Objective::subgradient).
    fn subgradient_block(&self, x: &[f64], range: Range<usize>, out: &mut [f64]) {
        let mut full = vec![0.0; self.dim()];
        self.subgradient(x, &mut full);
        out.copy_from_slice(&full[range]);
    }
}

/// Problem constants, when known. Names follow their role:
/// `map_bound` bounds `‖F‖` on X, `subgrad_bound` bounds `‖∇̃f‖` on X,
/// `norm_bound` bounds `‖x‖` on X.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProblemConstants {
    pub map_bound: Option<f64>,
    pub subgrad_bound: Option<f64>,
    pub norm_bound: Option<f64>,
    /// Strong convexity modulus of `f`.
    pub strong_convexity: Option<f64>,
    /// Strong monotonicity modulus of `F` (0 for merely monotone maps).
    pub map_strong_monotonicity: Option<f64>,
    /// Lipschitz constant of `F`.
    pub map_lipschitz: Option<f64>,
    /// Additive term `B_F` in `‖F(x)−F(y)‖² ≤ L_F²‖x−y‖² + B_F`.
    pub map_lipschitz_offset: Option<f64>,
    /// Lipschitz constant of `∇f`.
    pub objective_lipschitz: Option<f64>,
    /// Set when `map_bound`/`subgrad_bound` were estimated by sampling
    /// rather than derived.
    pub estimated: bool,
}

/// How to pick `x₀`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialPoint {
    /// Projection of a standard-normal draw onto X.
    #[default]
    ProjectedNormal,
    Fixed(Vec<f64>),
}

#[derive(Clone)]
pub struct ProblemSpec {
    name: String,
    structure: Arc<BlockStructure>,
    sets: Vec<SetDescriptor>,
    map: Arc<dyn Mapping>,
    objective: Arc<dyn Objective>,
    constants: ProblemConstants,
    known_solution: Option<Vec<f64>>,
    optimal_value: Option<f64>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("structure", &self.structure)
            .field("sets", &self.sets)
            .field("constants", &self.constants)
            .field("known_solution", &self.known_solution)
            .field("optimal_value", &self.optimal_value)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn new(
        name: impl Into<String>,
        structure: BlockStructure,
        sets: Vec<SetDescriptor>,
        map: Arc<dyn Mapping>,
        objective: Arc<dyn Objective>,
    ) -> Result<Self> {
        if sets.len() != structure.num_blocks() {
            return Err(Error::InvalidProblem(format!(
                "{} sets for {} blocks",
                sets.len(),
                structure.num_blocks()
            )));
        }
        for (i, set) in sets.iter().enumerate() {
            if set.dim() != structure.dims()[i] {
                return Err(Error::InvalidProblem(format!(
                    "set {i} has dimension {} but block {i} has dimension {}",
                    set.dim(),
                    structure.dims()[i]
                )));
            }
        }
        check_len(structure.dim(), map.dim())?;
        check_len(structure.dim(), objective.dim())?;

        let norm_bound = sets
            .iter()
            .map(|s| s.norm_bound().map(|m| m * m))
            .sum::<Option<f64>>()
            .map(f64::sqrt);
        let constants = ProblemConstants {
            norm_bound,
            ..Default::default()
        };
        Ok(Self {
            name: name.into(),
            structure: Arc::new(structure),
            sets,
            map,
            objective,
            constants,
            known_solution: None,
            optimal_value: None,
        })
    }

    pub fn with_constants(mut self, constants: ProblemConstants) -> Self {
        let norm_bound = constants.norm_bound.or(self.constants.norm_bound);
        self.constants = ProblemConstants {
            norm_bound,
            ..constants
        };
        self
    }

    pub fn with_known_solution(mut self, x: Vec<f64>) -> Result<Self> {
        check_len(self.dim(), x.len())?;
        if self.optimal_value.is_none() {
            self.optimal_value = Some(self.objective.value(&x));
        }
        self.known_solution = Some(x);
        Ok(self)
    }

    pub fn with_optimal_value(mut self, value: f64) -> Self {
        self.optimal_value = Some(value);
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn structure(&self) -> &Arc<BlockStructure> {
        &self.structure
    }

    pub fn sets(&self) -> &[SetDescriptor] {
        &self.sets
    }

    pub fn map(&self) -> &Arc<dyn Mapping> {
        &self.map
    }

    pub fn objective(&self) -> &Arc<dyn Objective> {
        &self.objective
    }

    pub fn constants(&self) -> &ProblemConstants {
        &self.constants
    }

    pub fn known_solution(&self) -> Option<&[f64]> {
        self.known_solution.as_deref()
    }

    pub fn optimal_value(&self) -> Option<f64> {
        self.optimal_value
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    pub fn num_blocks(&self) -> usize {
        self.structure.num_blocks()
    }

    pub fn is_bounded(&self) -> bool {
        self.sets.iter().all(SetDescriptor::is_bounded)
    }

    pub fn eval_map(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.map.eval(x, &mut out);
        out
    }

    pub fn eval_subgradient(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.objective.subgradient(x, &mut out);
        out
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.value(x)
    }

    /// Blockwise projection onto `X = X₁ × … × X_d`.
    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), v.len())?;
        let mut out = vec![0.0; self.dim()];
        self.project_into(v, &mut out);
        Ok(out)
    }

    pub(crate) fn project_into(&self, v: &[f64], out: &mut [f64]) {
        for (i, set) in self.sets.iter().enumerate() {
            let r = self.structure.range(i);
            set.project_into(&v[r.clone()], &mut out[r]);
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim()
            && self
                .sets
                .iter()
                .enumerate()
                .all(|(i, set)| set.contains(&x[self.structure.range(i)], tol))
    }

    /// Random feasible point (bounded X only).
    pub fn sample_feasible<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(self.dim());
        for set in &self.sets {
            out.extend(set.sample(rng)?);
        }
        Some(out)
    }

    pub fn initial_point<R: Rng + ?Sized>(
        &self,
        init: &InitialPoint,
        rng: &mut R,
    ) -> Result<BlockVector> {
        let data = match init {
            InitialPoint::ProjectedNormal => {
                let mut out = Vec::with_capacity(self.dim());
                for set in &self.sets {
                    out.extend(set.sample_projected_normal(rng));
                }
                out
            }
            InitialPoint::Fixed(x) => self.project(x)?,
        };
        BlockVector::new(self.structure.clone(), data)
    }

    /// Sampled maximum of `‖F‖` and `‖∇̃f‖` over X, inflated by 10%.
    pub fn estimate_bounds<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> Option<(f64, f64)> {
        let mut cf: f64 = 0.0;
        let mut cg: f64 = 0.0;
        for _ in 0..samples {
            let x = self.sample_feasible(rng)?;
            cf = cf.max(norm(&self.eval_map(&x)));
            cg = cg.max(norm(&self.eval_subgradient(&x)));
        }
        Some((1.1 * cf, 1.1 * cg))
    }
}
