//! A convex program `min f(x)` s.t. `Ax = b`, `h_j(x) ≤ 0`, `x ∈ X` is
//! rewritten as `min f` over the solutions of `VI(X, ∇φ)` with the penalty
//! `φ(x) = ½‖Ax − b‖² + ½Σ max(0, h_j(x))²`. The solutions of that
//! variational inequality are exactly the feasible points, so aRB-IRG
//! solves the original program without ever seeing its constraints
//! explicitly.

use std::sync::Arc;

use arbirg::block::dist;
use arbirg::maps::{Matrix, SquaredDistance};
use arbirg::problems::{build_penalized_program, random_penalized_program, solve_penalized, BallConstraint, PenalizedMap};
use arbirg::sets::SetDescriptor;
use arbirg::solvers::{run_arbirg, Budget, Checkpoints, RunOptions};
use arbirg::{BlockStructure, Schedule};

fn main() -> arbirg::Result<()> {
    // Feasibility side: any solution of the penalized VI is feasible.
    for seed in 0..5 {
        let prog = random_penalized_program(seed);
        let sol = solve_penalized(&prog.problem, &vec![1.5; prog.problem.dim()], 1e-8, 1_000_000)?;
        let h = prog.map.max_violation(&sol.x);
        println!(
            "random program {seed}: n = {}, ‖Ax−b‖ = {:.2e}, max h_j = {} after {} iterations",
            prog.problem.dim(),
            prog.map.equality_residual(&sol.x),
            if h.is_finite() { format!("{h:.2e}") } else { "none".into() },
            sol.iterations
        );
    }

    // Optimization side: the point of {x₁+x₂+x₃ = 1, ‖x‖² ≤ ½} closest to
    // c = (1, 0, 0), which is (2/3, 1/6, 1/6).
    let a = Matrix::from_rows(&[vec![1.0, 1.0, 1.0]]);
    let b = vec![1.0];
    let ball = BallConstraint {
        center: vec![0.0; 3],
        radius: 0.5f64.sqrt(),
    };
    let map = PenalizedMap::new(a.clone(), b.clone(), vec![Arc::new(ball.clone())])?;
    let problem = build_penalized_program(
        a,
        b,
        vec![Arc::new(ball)],
        BlockStructure::uniform(vec![1, 1, 1])?,
        vec![SetDescriptor::uniform_box(1, -2.0, 2.0)?; 3],
        Arc::new(SquaredDistance::new(vec![1.0, 0.0, 0.0])),
    )?;
    let xstar = [2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0];
    println!("\n{:>9}  {:>10}  {:>10}  {:>10}", "N", "‖x̄−x*‖", "‖Ax−b‖", "max h");
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let opts = RunOptions::new(Budget::iterations(n), 3).with_checkpoints(Checkpoints::At(vec![n]));
        let trace = run_arbirg(&problem, &Schedule::bounded(0.5, 1.0, 0.25, 0.0), &opts)?;
        let x = &trace.final_point;
        println!(
            "{n:>9}  {:>10.3e}  {:>10.3e}  {:>10.3e}",
            dist(x, &xstar),
            map.equality_residual(x),
            map.max_violation(x)
        );
    }
    Ok(())
}
