//! Solvers: the averaging randomized block method, the two-loop sequential
//! regularization baseline and the projection method used for regularized
//! subproblems and the Tikhonov trajectory.

mod arbirg;
mod projection;
mod sr;
mod trace;

pub use arbirg::{arbirg_step, arbirg_step_with, run_arbirg, StepScratch};
pub use projection::{
    max_subgradient_norm, projection_method, solve_regularized_vi, tikhonov_point,
    tikhonov_point_from, tikhonov_trajectory, InnerSolution, ProjectionIteration, RegularizedMap,
    Regularizer,
};
pub use sr::{run_sr, SrConfig};
pub use trace::{
    Budget, Checkpoints, MetricField, RunOptions, RunStatus, RunTrace, TraceMeta, TraceRecord,
};
