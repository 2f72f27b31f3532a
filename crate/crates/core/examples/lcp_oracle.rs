//! Brute-force complementarity oracle against the regularized projection
//! method on a small monotone LCP.

use std::sync::Arc;

use arbirg::maps::{Matrix, SquaredDistance};
use arbirg::problems::oracle::lcp_pattern_solutions;
use arbirg::problems::{affine_lcp, complementarity_violation};
use arbirg::solvers::{solve_regularized_vi, Regularizer};

fn main() -> arbirg::Result<()> {
    let q_mat = Matrix::from_rows(&[vec![3.0, 1.0, 0.0], vec![1.0, 2.0, 0.5], vec![0.0, 0.5, 1.0]]);
    let q = vec![-1.0, 0.5, -2.0];
    let patterns = lcp_pattern_solutions(&q_mat, &q, 1e-10);
    println!("pattern enumeration: {patterns:.6?}");

    let problem = affine_lcp(q_mat, q, Arc::new(SquaredDistance::origin(3)))?;
    // Q ≻ 0, so even a tiny regularization leaves the answer unchanged
    let x = solve_regularized_vi(&problem, 1e-9, Regularizer::Identity, 1e-12, 1_000_000, None)?;
    let (nx, nf, comp) = complementarity_violation(&problem, &x.x.as_slice());
    println!("projection method:   {:.6?}", x.x.as_slice());
    println!("violations: x ≥ 0 by {nx:.1e}, F ≥ 0 by {nf:.1e}, |xᵀF| = {comp:.1e}");
    Ok(())
}
