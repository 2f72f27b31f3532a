//! Block feasible sets with exact Euclidean projections.
//!
//! The balanced capacity set of a networked Cournot firm,
//!
//! ```text
//! { (y, s) ∈ ℝᴶ × ℝᴶ : Σ_j y_j = Σ_j s_j,  0 ≤ y_j ≤ B_j,  s_j ≥ 0 },
//! ```
//!
//! is projected through its scalar dual: for a multiplier `λ` on the balance
//! constraint the minimizer is `y_j(λ) = clamp(y0_j − λ, 0, B_j)`,
//! `s_j(λ) = max(s0_j + λ, 0)`, and the balance residual
//! `g(λ) = Σ y_j(λ) − Σ s_j(λ)` is continuous, nonincreasing and piecewise
//! linear. Its root is located exactly by sorting the breakpoints.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::block::{check_len, norm};
use crate::error::{Error, Result};

/// Default constraint-violation tolerance for [`SetDescriptor::contains`].
pub const DEFAULT_CONTAINS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    /// Coordinatewise bounds; `±∞` allowed.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    NonnegOrthant,
    WholeSpace,
    Ball { center: Vec<f64>, radius: f64 },
    /// Vector layout `(y_1, …, y_J, s_1, …, s_J)`.
    BalancedBox { caps: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetDescriptor {
    kind: SetKind,
    dim: usize,
}

impl SetDescriptor {
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::InvalidSet("box of dimension 0".into()));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() || l > u {
                return Err(Error::InvalidSet(format!(
                    "box coordinate {i} has lower {l} > upper {u}"
                )));
            }
        }
        let dim = lower.len();
        Ok(Self {
            kind: SetKind::Box { lower, upper },
            dim,
        })
    }

    pub fn uniform_box(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::boxed(vec![lower; dim], vec![upper; dim])
    }

    pub fn nonneg_orthant(dim: usize) -> Self {
        Self {
            kind: SetKind::NonnegOrthant,
            dim,
        }
    }

    pub fn whole_space(dim: usize) -> Self {
        Self {
            kind: SetKind::WholeSpace,
            dim,
        }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidSet(format!("ball radius {radius} must be positive")));
        }
        let dim = center.len();
        Ok(Self {
            kind: SetKind::Ball { center, radius },
            dim,
        })
    }

    pub fn balanced_box(caps: Vec<f64>) -> Result<Self> {
        if caps.is_empty() {
            return Err(Error::InvalidSet("balanced box needs at least one node".into()));
        }
        if let Some(c) = caps.iter().find(|&&c| !(c > 0.0) || !c.is_finite()) {
            return Err(Error::InvalidSet(format!("capacity {c} must be positive and finite")));
        }
        let dim = 2 * caps.len();
        Ok(Self {
            kind: SetKind::BalancedBox { caps },
            dim,
        })
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_bounded(&self) -> bool {
        match &self.kind {
            SetKind::Box { lower, upper } => lower
                .iter()
                .chain(upper)
                .all(|v| v.is_finite()),
            SetKind::NonnegOrthant | SetKind::WholeSpace => false,
            SetKind::Ball { .. } | SetKind::BalancedBox { .. } => true,
        }
    }

    /// `sup { ‖x‖ : x in the set }` when finite (an upper bound for the
    /// balanced box).
    pub fn norm_bound(&self) -> Option<f64> {
        match &self.kind {
            SetKind::Box { lower, upper } => {
                if !self.is_bounded() {
                    return None;
                }
                Some(
                    lower
                        .iter()
                        .zip(upper)
                        .map(|(l, u)| l.abs().max(u.abs()).powi(2))
                        .sum::<f64>()
                        .sqrt(),
                )
            }
            SetKind::Ball { center, radius } => Some(norm(center) + radius),
            SetKind::BalancedBox { caps } => {
                let sq: f64 = caps.iter().map(|c| c * c).sum();
                let total: f64 = caps.iter().sum();
                Some((sq + total * total).sqrt())
            }
            SetKind::NonnegOrthant | SetKind::WholeSpace => None,
        }
    }

    /// Writes the Euclidean projection of `v` into `out`.
    pub fn project_into(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        match &self.kind {
            SetKind::Box { lower, upper } => {
                for i in 0..self.dim {
                    out[i] = v[i].max(lower[i]).min(upper[i]);
                }
            }
            SetKind::NonnegOrthant => {
                for (o, &x) in out.iter_mut().zip(v) {
                    *o = x.max(0.0);
                }
            }
            SetKind::WholeSpace => out.copy_from_slice(v),
            SetKind::Ball { center, radius } => {
                let d: f64 = v
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    .sqrt();
                let scale = if d > *radius { radius / d } else { 1.0 };
                for i in 0..self.dim {
                    out[i] = center[i] + scale * (v[i] - center[i]);
                }
            }
            SetKind::BalancedBox { caps } => {
                let j = caps.len();
                let (y0, s0) = v.split_at(j);
                let (y, s) = out.split_at_mut(j);
                project_balanced_into(caps, y0, s0, y, s);
            }
        }
    }

    pub fn project(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim, v.len())?;
        let mut out = vec![0.0; self.dim];
        self.project_into(v, &mut out);
        Ok(out)
    }

    pub fn project_in_place(&self, v: &mut [f64]) {
        match &self.kind {
            SetKind::WholeSpace => {}
            SetKind::NonnegOrthant => v.iter_mut().for_each(|x| *x = x.max(0.0)),
            SetKind::Box { lower, upper } => {
                for i in 0..self.dim {
                    v[i] = v[i].max(lower[i]).min(upper[i]);
                }
            }
            _ => {
                let src = v.to_vec();
                self.project_into(&src, v);
            }
        }
    }

    /// True iff every defining constraint is violated by at most `tol`.
    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        if v.len() != self.dim || v.iter().any(|x| x.is_nan()) {
            return false;
        }
        match &self.kind {
            SetKind::Box { lower, upper } => v
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&x, (&l, &u))| x >= l - tol && x <= u + tol),
            SetKind::NonnegOrthant => v.iter().all(|&x| x >= -tol),
            SetKind::WholeSpace => true,
            SetKind::Ball { center, radius } => {
                let d: f64 = v
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    .sqrt();
                d <= radius + tol
            }
            SetKind::BalancedBox { caps } => {
                let j = caps.len();
                let (y, s) = v.split_at(j);
                let bounds = y
                    .iter()
                    .zip(caps)
                    .all(|(&yj, &b)| yj >= -tol && yj <= b + tol)
                    && s.iter().all(|&sj| sj >= -tol);
                let balance = (y.iter().sum::<f64>() - s.iter().sum::<f64>()).abs();
                bounds && balance <= tol
            }
        }
    }

    /// A random feasible point with full support on the set, or `None` for
    /// unbounded sets.
    ///
    /// Boxes are sampled uniformly, balls uniformly through a normalized
    /// Gaussian direction, balanced boxes by projecting a uniform draw from
    /// `[0, B] × [0, ΣB]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec<f64>> {
        match &self.kind {
            SetKind::Box { lower, upper } => {
                if !self.is_bounded() {
                    return None;
                }
                Some(
                    lower
                        .iter()
                        .zip(upper)
                        .map(|(&l, &u)| if u > l { rng.random_range(l..=u) } else { l })
                        .collect(),
                )
            }
            SetKind::Ball { center, radius } => {
                let dir: Vec<f64> = (0..self.dim).map(|_| StandardNormal.sample(rng)).collect();
                let n = norm(&dir).max(f64::MIN_POSITIVE);
                let u: f64 = rng.random();
                let rad = radius * u.powf(1.0 / self.dim as f64);
                Some(
                    center
                        .iter()
                        .zip(&dir)
                        .map(|(c, d)| c + rad * d / n)
                        .collect(),
                )
            }
            SetKind::BalancedBox { caps } => {
                let total: f64 = caps.iter().sum();
                let mut raw: Vec<f64> = caps.iter().map(|&b| rng.random_range(0.0..=b)).collect();
                raw.extend(caps.iter().map(|_| rng.random_range(0.0..=total)));
                let mut out = vec![0.0; self.dim];
                self.project_into(&raw, &mut out);
                Some(out)
            }
            SetKind::NonnegOrthant | SetKind::WholeSpace => None,
        }
    }

    /// Projection of a standard-normal draw onto the set.
    pub fn sample_projected_normal<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let raw: Vec<f64> = (0..self.dim).map(|_| StandardNormal.sample(rng)).collect();
        let mut out = vec![0.0; self.dim];
        self.project_into(&raw, &mut out);
        out
    }
}

/// Projects `(y0, s0)` onto the balanced capacity set with caps `caps`.
pub fn project_balanced(caps: &[f64], y0: &[f64], s0: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(caps.len(), y0.len())?;
    check_len(caps.len(), s0.len())?;
    if let Some(c) = caps.iter().find(|&&c| !(c > 0.0)) {
        return Err(Error::InvalidSet(format!("capacity {c} must be positive")));
    }
    let mut y = vec![0.0; caps.len()];
    let mut s = vec![0.0; caps.len()];
    project_balanced_into(caps, y0, s0, &mut y, &mut s);
    Ok((y, s))
}

fn balance_residual(caps: &[f64], y0: &[f64], s0: &[f64], lambda: f64) -> f64 {
    let mut g = 0.0;
    for j in 0..caps.len() {
        g += (y0[j] - lambda).max(0.0).min(caps[j]);
        g -= (s0[j] + lambda).max(0.0);
    }
    g
}

fn project_balanced_into(caps: &[f64], y0: &[f64], s0: &[f64], y: &mut [f64], s: &mut [f64]) {
    let j = caps.len();
    let mut breaks = Vec::with_capacity(3 * j);
    for i in 0..j {
        breaks.push(y0[i]);
        breaks.push(y0[i] - caps[i]);
        breaks.push(-s0[i]);
    }
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();

    // Left of every breakpoint g = Σ B > 0; right of the last one it falls
    // with slope −J.
    let mut lambda = None;
    let mut prev = (breaks[0], balance_residual(caps, y0, s0, breaks[0]));
    if prev.1 <= 0.0 {
        lambda = Some(prev.0);
    } else {
        for &bk in &breaks[1..] {
            let g = balance_residual(caps, y0, s0, bk);
            if g <= 0.0 {
                let (l0, g0) = prev;
                lambda = Some(if g0 == g { l0 } else { l0 + g0 * (bk - l0) / (g0 - g) });
                break;
            }
            prev = (bk, g);
        }
    }
    let lambda = lambda.unwrap_or_else(|| {
        let (l_last, g_last) = prev;
        l_last + g_last / j as f64
    });

    for i in 0..j {
        y[i] = (y0[i] - lambda).max(0.0).min(caps[i]);
        s[i] = (s0[i] + lambda).max(0.0);
    }
}
