//! Networked Nash–Cournot game.
//!
//! Firm `i` produces `y_ij ≤ B_ij` at node `j` with linear cost `c_ij y_ij`
//! and sells `s_ij` there, with `Σ_j y_ij = Σ_j s_ij`. Node prices are
//! `p_j(s̄_j) = α_j − β_j s̄_j^σ` with `s̄_j = Σ_i s_ij`, and firm `i` minimizes
//!
//! ```text
//! g_i(x) = Σ_j c_ij y_ij − Σ_j s_ij p_j(s̄_j).
//! ```
//!
//! The equilibrium map stacks `∇_{x^{(i)}} g_i`; the objective is the
//! Marshallian aggregate `f = Σ_i g_i`. Each block is laid out as
//! `(y_i1, …, y_iJ, s_i1, …, s_iJ)`.

use std::ops::Range;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::block::BlockStructure;
use crate::error::{Error, Result};
use crate::problem::{Mapping, Objective, ProblemConstants, ProblemSpec};
use crate::rng::rng_from_seed;
use crate::sets::SetDescriptor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CournotParams {
    /// Number of firms.
    pub d: usize,
    /// Number of nodes.
    pub j: usize,
    /// Linear cost slopes, `c_slopes[i][j]`.
    pub c_slopes: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Production capacities, `caps[i][j]`.
    pub caps: Vec<Vec<f64>>,
    pub sigma: f64,
}

impl CournotParams {
    /// Paper-style parameters with uniform `α`, `β`, `B` and the given
    /// cost slopes.
    pub fn uniform(c_slopes: Vec<Vec<f64>>, alpha: f64, beta: f64, cap: f64, sigma: f64) -> Self {
        let d = c_slopes.len();
        let j = c_slopes.first().map_or(0, Vec::len);
        Self {
            d,
            j,
            c_slopes,
            alpha: vec![alpha; j],
            beta: vec![beta; j],
            caps: vec![vec![cap; j]; d],
            sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidProblem(m));
        if self.d == 0 || self.j == 0 {
            return bad("Cournot game needs at least one firm and one node".into());
        }
        if self.c_slopes.len() != self.d
            || self.caps.len() != self.d
            || self.c_slopes.iter().chain(&self.caps).any(|r| r.len() != self.j)
            || self.alpha.len() != self.j
            || self.beta.len() != self.j
        {
            return bad(format!("parameter shapes do not match d = {}, J = {}", self.d, self.j));
        }
        if self.alpha.iter().chain(&self.beta).any(|v| !(*v > 0.0 && v.is_finite())) {
            return bad("α_j and β_j must be positive".into());
        }
        if self.caps.iter().flatten().any(|v| !(*v > 0.0 && v.is_finite())) {
            return bad("capacities must be positive".into());
        }
        if self.c_slopes.iter().flatten().any(|v| !v.is_finite()) {
            return bad("cost slopes must be finite".into());
        }
        let s = self.sigma;
        if !(s >= 1.0) {
            return bad(format!("σ = {s} must be at least 1"));
        }
        if s > 1.0 {
            let limit = (3.0 * s - 1.0) / (s - 1.0);
            if s > 3.0 || self.d as f64 > limit {
                return bad(format!(
                    "monotonicity guard fails: σ = {s} needs σ ≤ 3 and d = {} ≤ (3σ−1)/(σ−1) = {limit:.3}",
                    self.d
                ));
            }
        }
        Ok(())
    }

    /// `S = Σ_{i,j} B_ij`, an upper bound on every `s̄_j` over X.
    pub fn total_capacity(&self) -> f64 {
        self.caps.iter().flatten().sum()
    }

    fn coord_bound(&self, coef: f64) -> f64 {
        // On X, −α_j ≤ ∂/∂s ≤ −α_j + coef·β_j S^σ.
        let s_pow = self.total_capacity().powf(self.sigma);
        (0..self.j)
            .map(|j| self.alpha[j].max(-self.alpha[j] + coef * self.beta[j] * s_pow))
            .fold(0.0, f64::max)
    }

    fn cost_norm_sq(&self) -> f64 {
        self.c_slopes.iter().flatten().map(|c| c * c).sum()
    }

    /// Derived bounds: `‖F‖`, `‖∇f‖` over X and Lipschitz constants of `F`
    /// and `∇f` (Frobenius bounds of the Jacobians).
    pub fn constants(&self) -> ProblemConstants {
        let nsj = (self.d * self.j) as f64;
        let sigma = self.sigma;
        let bound = self.coord_bound(1.0 + sigma);
        let map_bound = (self.cost_norm_sq() + nsj * bound * bound).sqrt();
        let subgrad_bound = map_bound;

        let s_pow = self.total_capacity().powf(sigma - 1.0);
        let bmax = self.beta.iter().cloned().fold(0.0, f64::max);
        let base = sigma * bmax * s_pow;
        let diag = base * (2.0 + (sigma - 1.0));
        let off = base * (1.0 + (sigma - 1.0));
        let d = self.d as f64;
        let j = self.j as f64;
        let map_lipschitz = (j * (d * diag * diag + d * (d - 1.0) * off * off)).sqrt();
        let hess = (1.0 + sigma) * sigma * bmax * s_pow;
        let objective_lipschitz = (j * d * d).sqrt() * hess;
        ProblemConstants {
            map_bound: Some(map_bound),
            subgrad_bound: Some(subgrad_bound),
            norm_bound: None,
            strong_convexity: Some(0.0),
            map_strong_monotonicity: None,
            map_lipschitz: Some(map_lipschitz),
            map_lipschitz_offset: Some(0.0),
            objective_lipschitz: Some(objective_lipschitz),
            estimated: false,
        }
    }
}

/// `s̄_j^{σ−1}` and `s̄_j^{σ−2}`-type factors need care at `s̄_j = 0`: the
/// products they appear in vanish there, so they are set to 0 for σ > 1.
fn pow_or_zero(base: f64, exp: f64) -> f64 {
    if base <= 0.0 {
        if exp == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        base.powf(exp)
    }
}

#[derive(Debug, Clone)]
struct Game {
    params: CournotParams,
}

impl Game {
    fn stride(&self) -> usize {
        2 * self.params.j
    }

    fn totals(&self, x: &[f64]) -> Vec<f64> {
        let (d, j) = (self.params.d, self.params.j);
        (0..j)
            .map(|n| (0..d).map(|i| x[i * 2 * j + j + n]).sum::<f64>().max(0.0))
            .collect()
    }
}

/// The equilibrium map `(∇_{x^{(1)}} g_1; …; ∇_{x^{(d)}} g_d)`.
#[derive(Debug, Clone)]
pub struct CournotMap(Game);

impl CournotMap {
    fn firm(&self, x: &[f64], totals: &[f64], i: usize, out: &mut [f64]) {
        let p = &self.0.params;
        let j = p.j;
        let base = i * 2 * j;
        for n in 0..j {
            out[n] = p.c_slopes[i][n];
            let sbar = totals[n];
            let sij = x[base + j + n];
            let b = p.beta[n];
            out[j + n] = -p.alpha[n]
                + b * pow_or_zero(sbar, p.sigma)
                + p.sigma * b * sij * pow_or_zero(sbar, p.sigma - 1.0);
        }
    }
}

impl Mapping for CournotMap {
    fn dim(&self) -> usize {
        self.0.params.d * self.0.stride()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        let totals = self.0.totals(x);
        let w = self.0.stride();
        for i in 0..self.0.params.d {
            self.firm(x, &totals, i, &mut out[i * w..(i + 1) * w]);
        }
    }

    fn eval_block(&self, x: &[f64], range: Range<usize>, out: &mut [f64]) {
        let w = self.0.stride();
        if range.start % w == 0 && range.len() == w {
            let totals = self.0.totals(x);
            self.firm(x, &totals, range.start / w, out);
        } else {
            let mut full = vec![0.0; self.dim()];
            self.eval(x, &mut full);
            out.copy_from_slice(&full[range]);
        }
    }

    /// Exact `J_F(x)ᵀ v`; only the `s` components depend on `x`.
    fn jacobian_transpose_product(&self, x: &[f64], v: &[f64], out: &mut [f64]) {
        let p = &self.0.params;
        let (d, j) = (p.d, p.j);
        let totals = self.0.totals(x);
        out.iter_mut().for_each(|o| *o = 0.0);
        for n in 0..j {
            let sbar = totals[n];
            let b = p.beta[n];
            let s = p.sigma;
            let t1 = s * b * pow_or_zero(sbar, s - 1.0);
            let t2 = s * (s - 1.0) * b * pow_or_zero(sbar, s - 2.0);
            let sum_v: f64 = (0..d).map(|i| v[i * 2 * j + j + n]).sum();
            let sum_sv: f64 = (0..d)
                .map(|i| x[i * 2 * j + j + n] * v[i * 2 * j + j + n])
                .sum();
            for k in 0..d {
                let idx = k * 2 * j + j + n;
                out[idx] = t1 * sum_v + t1 * v[idx] + t2 * sum_sv;
            }
        }
    }
}

/// Marshallian aggregate `f = Σ_i g_i`.
#[derive(Debug, Clone)]
pub struct MarshallianObjective(Game);

impl MarshallianObjective {
    fn firm(&self, totals: &[f64], i: usize, out: &mut [f64]) {
        let p = &self.0.params;
        let j = p.j;
        for n in 0..j {
            out[n] = p.c_slopes[i][n];
            out[j + n] = -p.alpha[n] + (1.0 + p.sigma) * p.beta[n] * pow_or_zero(totals[n], p.sigma);
        }
    }
}

impl Objective for MarshallianObjective {
    fn dim(&self) -> usize {
        self.0.params.d * self.0.stride()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let p = &self.0.params;
        let j = p.j;
        let mut cost = 0.0;
        for i in 0..p.d {
            for n in 0..j {
                cost += p.c_slopes[i][n] * x[i * 2 * j + n];
            }
        }
        let totals = self.0.totals(x);
        let revenue: f64 = (0..j)
            .map(|n| totals[n] * (p.alpha[n] - p.beta[n] * pow_or_zero(totals[n], p.sigma)))
            .sum();
        cost - revenue
    }

    fn subgradient(&self, x: &[f64], out: &mut [f64]) {
        let totals = self.0.totals(x);
        let w = self.0.stride();
        for i in 0..self.0.params.d {
            self.firm(&totals, i, &mut out[i * w..(i + 1) * w]);
        }
    }

    fn subgradient_block(&self, x: &[f64], range: Range<usize>, out: &mut [f64]) {
        let w = self.0.stride();
        if range.start % w == 0 && range.len() == w {
            let totals = self.0.totals(x);
            self.firm(&totals, range.start / w, out);
        } else {
            let mut full = vec![0.0; self.dim()];
            self.subgradient(x, &mut full);
            out.copy_from_slice(&full[range]);
        }
    }
}

/// Builds the game with uniform block sampling and one balanced capacity
/// set per firm.
pub fn build_cournot(params: CournotParams) -> Result<ProblemSpec> {
    params.validate()?;
    let constants = params.constants();
    let structure = BlockStructure::equal_blocks(params.d, 2 * params.j)?;
    let sets = params
        .caps
        .iter()
        .map(|c| SetDescriptor::balanced_box(c.clone()))
        .collect::<Result<Vec<_>>>()?;
    let name = format!("cournot-d{}-J{}", params.d, params.j);
    let game = Game { params };
    ProblemSpec::new(
        name,
        structure,
        sets,
        Arc::new(CournotMap(game.clone())),
        Arc::new(MarshallianObjective(game)),
    )
    .map(|p| p.with_constants(constants))
}

/// Four firms over three nodes with `α_j = 50`, `β_j = 0.05`, `B_ij = 120`,
/// `σ = 1.01` and cost slopes drawn uniformly from `[10, 50]` with `seed`.
pub fn paper_cournot_params(seed: u64) -> CournotParams {
    let mut rng = rng_from_seed(seed);
    let c: Vec<Vec<f64>> = (0..4)
        .map(|_| (0..3).map(|_| rng.random_range(10.0..=50.0)).collect())
        .collect();
    CournotParams::uniform(c, 50.0, 0.05, 120.0, 1.01)
}

pub fn paper_cournot_instance(seed: u64) -> ProblemSpec {
    build_cournot(paper_cournot_params(seed))
        .expect("default parameters satisfy the monotonicity guard")
        .with_name(format!("cournot-paper-seed{seed}"))
}
