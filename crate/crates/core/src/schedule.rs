//! Step-size and regularization schedules.
//!
//! `γ_k = γ₀ (k+1)^{-a}` and `η_k = η₀ (k+1)^{-b}`. Two exponent regimes carry
//! guarantees: with a bounded feasible set `a = 1/2` and `0 < b < 1/2`; with an
//! unbounded set `0 < b < 1/2 < a` and `a + b < 1`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    #[default]
    BoundedX,
    UnboundedX,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub gamma0: f64,
    pub eta0: f64,
    pub a: f64,
    pub b: f64,
    /// Averaging exponent; iterate `k` gets weight `γ_k^r`.
    pub r: f64,
    pub mode: ScheduleMode,
}

impl Schedule {
    /// `γ_k = γ₀/√(k+1)`, `η_k = η₀/(k+1)^b`.
    pub fn bounded(gamma0: f64, eta0: f64, b: f64, r: f64) -> Self {
        Self {
            gamma0,
            eta0,
            a: 0.5,
            b,
            r,
            mode: ScheduleMode::BoundedX,
        }
    }

    pub fn unbounded(gamma0: f64, eta0: f64, a: f64, b: f64, r: f64) -> Self {
        Self {
            gamma0,
            eta0,
            a,
            b,
            r,
            mode: ScheduleMode::UnboundedX,
        }
    }

    pub fn stepsize(&self, k: u64) -> f64 {
        self.gamma0 * ((k + 1) as f64).powf(-self.a)
    }

    pub fn regparam(&self, k: u64) -> f64 {
        self.eta0 * ((k + 1) as f64).powf(-self.b)
    }

    /// Averaging weight `γ_k^r` of iterate `k`.
    pub fn weight(&self, k: u64) -> f64 {
        self.stepsize(k).powf(self.r)
    }

    pub fn validate(&self) -> ScheduleReport {
        let mut violations = Vec::new();
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            violations.push(format!("gamma0 = {} must be positive and finite", self.gamma0));
        }
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            violations.push(format!("eta0 = {} must be positive and finite", self.eta0));
        }
        if !(0.0..1.0).contains(&self.r) {
            violations.push(format!("r = {} must lie in [0, 1)", self.r));
        }
        if !(self.b > 0.0) {
            violations.push(format!("b = {} must be > 0", self.b));
        }
        if !(self.b < 0.5) {
            violations.push(format!("b = {} must be < 0.5", self.b));
        }
        match self.mode {
            ScheduleMode::BoundedX => {
                if self.a != 0.5 {
                    violations.push(format!("a = {} must equal 0.5 for a bounded set", self.a));
                }
            }
            ScheduleMode::UnboundedX => {
                if !(self.a > 0.5) {
                    violations.push(format!("a = {} must be > 0.5", self.a));
                }
                if !(self.a + self.b < 1.0) {
                    violations.push(format!("a + b = {} must be < 1", self.a + self.b));
                }
            }
        }
        ScheduleReport { violations }
    }
}

/// Outcome of [`Schedule::validate`]; rejection lists every violated
/// inequality.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScheduleReport {
    pub violations: Vec<String>,
}

impl ScheduleReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> crate::Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(crate::Error::InvalidSchedule(self.violations.join("; ")))
        }
    }
}
