use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::schedule::Schedule;

/// Constants entering the bounded-X rate bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBoundConstants {
    /// `M ≥ ‖x‖` on X.
    pub norm_bound: f64,
    /// `C_F ≥ ‖F(x)‖` on X.
    pub map_bound: f64,
    /// `C_f ≥ ‖∇̃f(x)‖` on X.
    pub subgrad_bound: f64,
    pub p_min: f64,
}

impl RateBoundConstants {
    /// Reads the constants stored on a problem; the error lists every
    /// missing one.
    pub fn from_problem(problem: &ProblemSpec) -> Result<Self> {
        let c = problem.constants();
        let mut missing = Vec::new();
        if c.norm_bound.is_none() {
            missing.push("norm_bound (M)");
        }
        if c.map_bound.is_none() {
            missing.push("map_bound (C_F)");
        }
        if c.subgrad_bound.is_none() {
            missing.push("subgrad_bound (C_f)");
        }
        if !missing.is_empty() {
            return Err(Error::MissingReference(format!(
                "problem '{}' lacks {}",
                problem.name(),
                missing.join(", ")
            )));
        }
        Ok(Self {
            norm_bound: c.norm_bound.unwrap(),
            map_bound: c.map_bound.unwrap(),
            subgrad_bound: c.subgrad_bound.unwrap(),
            p_min: problem.structure().p_min(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBounds {
    /// Bound on `E[f(x̄_N)] − f*`.
    pub subopt: f64,
    /// Bound on `E[GAP(x̄_N)]`.
    pub gap: f64,
}

/// Smallest integer `N ≥ 2^{e} − 1`, guarding against rounding just above an
/// integer.
fn power_threshold(exponent: f64) -> u64 {
    let t = exponent.exp2() - 1.0;
    let r = t.round();
    if (t - r).abs() <= 1e-9 * t.abs().max(1.0) {
        r as u64
    } else {
        t.ceil() as u64
    }
}

/// Smallest `N` for which the rate bounds hold: `⌈2^{2/(1−r)} − 1⌉`.
pub fn rate_bound_threshold(r: f64) -> u64 {
    power_threshold(2.0 / (1.0 - r))
}

/// Evaluates the bounded-X suboptimality and gap bounds at `N` for
/// `γ_k = γ₀/√(k+1)`, `η_k = η₀/(k+1)^b` and averaging exponent `r`:
///
/// ```text
/// subopt ≤ (2−r)/(p_min η₀) · (4M²/γ₀ + γ₀(C_F² + η₀²C_f²)/(0.5 − 0.5r + b)) · (N+1)^{−(0.5−b)}
/// gap    ≤ (2−r)/p_min · (4M²/γ₀ + γ₀(C_F² + η₀²C_f²)/(0.5 − 0.5r)
///                          + 2 p_min C_f M η₀/(1 − 0.5r − b)) · (N+1)^{−b}
/// ```
pub fn rate_bounds(c: &RateBoundConstants, schedule: &Schedule, n: u64) -> Result<RateBounds> {
    let Schedule {
        gamma0: g0,
        eta0: e0,
        b,
        r,
        ..
    } = *schedule;
    if !(b > 0.0 && b < 0.5) {
        return Err(Error::InvalidSchedule(format!("b = {b} must lie in (0, 0.5)")));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::InvalidSchedule(format!("r = {r} must lie in [0, 1)")));
    }
    if !(g0 > 0.0 && e0 > 0.0) {
        return Err(Error::InvalidSchedule("γ₀ and η₀ must be positive".into()));
    }
    let min = rate_bound_threshold(r);
    if n < min {
        return Err(Error::BelowThreshold { n, min });
    }
    let m2 = c.norm_bound * c.norm_bound;
    let var = c.map_bound * c.map_bound + e0 * e0 * c.subgrad_bound * c.subgrad_bound;
    let np1 = (n + 1) as f64;
    let subopt = (2.0 - r) / (c.p_min * e0)
        * (4.0 * m2 / g0 + g0 * var / (0.5 - 0.5 * r + b))
        * np1.powf(-(0.5 - b));
    let gap = (2.0 - r) / c.p_min
        * (4.0 * m2 / g0
            + g0 * var / (0.5 - 0.5 * r)
            + 2.0 * c.p_min * c.subgrad_bound * c.norm_bound * e0 / (1.0 - 0.5 * r - b))
        * np1.powf(-b);
    Ok(RateBounds { subopt, gap })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicCheck {
    pub sum: f64,
    pub lower: f64,
    pub upper: f64,
    pub ok: bool,
}

/// Smallest `N` with `N ≥ 2^{1/(1−α)} − 1`.
pub fn harmonic_threshold(alpha: f64) -> u64 {
    power_threshold(1.0 / (1.0 - alpha))
}

/// Compares `Σ_{k=0}^{N} (k+1)^{−α}` with
/// `[(N+1)^{1−α}/(2(1−α)), (N+1)^{1−α}/(1−α)]`.
///
/// The sum is compensated (Neumaier), and the comparison allows a relative
/// slack of `1e-12` for the remaining rounding.
pub fn harmonic_bounds_check(alpha: f64, n: u64) -> Result<HarmonicCheck> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha = {alpha} must lie in [0, 1)")));
    }
    let min = harmonic_threshold(alpha);
    if n < min {
        return Err(Error::BelowThreshold { n, min });
    }
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for k in 0..=n {
        let term = ((k + 1) as f64).powf(-alpha);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    let sum = sum + comp;
    let upper = ((n + 1) as f64).powf(1.0 - alpha) / (1.0 - alpha);
    let lower = 0.5 * upper;
    let slack = 1e-12 * upper;
    Ok(HarmonicCheck {
        sum,
        lower,
        upper,
        ok: lower <= sum + slack && sum <= upper + slack,
    })
}

/// Bound on successive Tikhonov points,
/// `‖x*_{η_k} − x*_{η_{k−1}}‖ ≤ (C̄_f/μ_f)·|1 − η_{k−1}/η_k|`.
pub fn tikhonov_step_bound(cbar: f64, mu_f: f64, eta_prev: f64, eta: f64) -> f64 {
    cbar / mu_f * (1.0 - eta_prev / eta).abs()
}
