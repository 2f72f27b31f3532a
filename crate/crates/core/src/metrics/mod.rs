//! Accuracy metrics, rate bounds and sampling diagnostics.
//!
//! * [`dual_gap_estimate`]: a certified lower bound on
//!   `GAP(x) = sup_{y∈X} F(y)ᵀ(x − y)` for bounded X.
//! * [`natural_residual`]: `‖x − P_X(x − F(x))‖`, defined for any X.
//! * [`suboptimality`]: `f(x) − f*` against a stored reference.
//! * [`rate_bounds`], [`harmonic_bounds_check`], [`tikhonov_step_bound`]:
//!   closed-form bounds used to validate runs.
//! * [`rb_error_moments`]: Monte Carlo moments of the block-sampling error.
//! * [`rate_slope`]: fitted log-log decay exponent of a metric.

mod bounds;
mod gap;
mod moments;
mod residual;
mod slope;

pub use bounds::{
    harmonic_bounds_check, harmonic_threshold, rate_bound_threshold, rate_bounds,
    tikhonov_step_bound, HarmonicCheck, RateBoundConstants, RateBounds,
};
pub use gap::{dual_gap_estimate, gap_objective, GapEstimatorConfig};
pub use moments::{exact_error_moments, rb_error_moments, ErrorMoments, ExactErrorMoments};
pub use residual::{natural_residual, suboptimality};
pub use slope::rate_slope;
