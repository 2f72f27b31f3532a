//! Problem builders: the networked Nash–Cournot game, penalized convex
//! programs, complementarity problems and synthetic instances with known
//! solutions, plus brute-force reference solvers in [`oracle`].

mod cournot;
mod l1_box;
mod lcp;
pub mod oracle;
mod penalized;
mod strongly_convex;

pub use cournot::{
    build_cournot, paper_cournot_instance, paper_cournot_params, CournotMap, CournotParams,
    MarshallianObjective,
};
pub use l1_box::{build_l1_over_affine_box, random_l1_box_instance, random_l1_box_instance_sized};
pub use lcp::{affine_lcp, build_lcp, complementarity_violation};
pub use penalized::{
    build_penalized_program, random_penalized_program, solve_penalized, BallConstraint,
    ConvexConstraint, LinearConstraint, PenalizedMap, PenalizedSolution, RandomProgram,
};
pub use strongly_convex::{
    build_strongly_convex_unbounded, build_zero_map_orthant, degenerate_face_instance,
    random_strongly_convex_instance, scalar_tikhonov_instance,
};
