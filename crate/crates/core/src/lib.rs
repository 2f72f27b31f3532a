//! # arbirg
//!
//! Single-loop solvers for convex optimization problems whose feasible set is
//! the solution set of a Cartesian variational inequality:
//!
//! ```text
//! minimize    f(x)
//! subject to  x ∈ SOL(X, F),   X = X_1 × … × X_d
//! ```
//!
//! The main method is the averaging randomized block iteratively regularized
//! gradient scheme ([`solvers::run_arbirg`]). At every iteration one block
//! `i_k` is drawn at random and updated with a projected step along the
//! regularized map `F_i(x) + η_k ∇_i f(x)`, while `γ_k` and `η_k` decay on a
//! fixed polynomial schedule and a weighted average `x̄_k` is maintained.
//!
//! Alongside it the crate ships
//!
//! * a two-loop sequential regularization baseline ([`solvers::run_sr`]) and a
//!   fixed-step projection method for strongly monotone regularized problems,
//! * exact Euclidean projections onto boxes, balls, orthants and the
//!   balanced capacity sets of networked Cournot games ([`sets`]),
//! * error metrics: a certified lower-bound estimator of the dual gap, the
//!   natural-map residual, suboptimality and the theoretical rate bounds
//!   ([`metrics`]),
//! * problem builders, including a networked Nash–Cournot game and synthetic
//!   instances with analytically known solutions ([`problems`]),
//! * an experiment harness with replicated runs, CSV traces and comparison
//!   reports ([`harness`]).
//!
//! Runnable examples for every capability live under `examples/`.

pub mod averaging;
pub mod block;
pub mod error;
pub mod harness;
pub mod maps;
pub mod metrics;
pub mod problem;
pub mod problems;
pub mod rng;
pub mod schedule;
pub mod sets;
pub mod solvers;

pub use block::{BlockStructure, BlockVector};
pub use error::{Error, Result};
pub use problem::{Mapping, Objective, ProblemConstants, ProblemSpec};
pub use schedule::{Schedule, ScheduleMode};
pub use sets::SetDescriptor;
