//! Minimal aRB-IRG run: pick the solution of a monotone complementarity
//! problem closest to a target point, over an unbounded orthant.
//!
//! Run with `cargo run --release --example basic_solve`.

use arbirg::maps::Matrix;
use arbirg::problems::build_strongly_convex_unbounded;
use arbirg::solvers::{run_arbirg, Budget, Checkpoints, MetricField, RunOptions};
use arbirg::{BlockStructure, Schedule};

fn main() -> arbirg::Result<()> {
    // F(x) = Qx + q with a singular Q, so SOL(ℝ³₊, F) is a segment; the
    // objective ½‖x − c‖² selects one point of it.
    let q_mat = Matrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 0.0]]);
    let problem = build_strongly_convex_unbounded(
        q_mat,
        vec![-1.0, -1.0, 0.0],
        vec![0.0, 0.0, 0.5],
        BlockStructure::uniform(vec![1, 1, 1])?,
    )?;
    let xstar = problem.known_solution().expect("builder computes x*").to_vec();

    let schedule = Schedule::unbounded(0.5, 1.0, 0.6, 0.3, 0.0);
    let opts = RunOptions::new(Budget::iterations(200_000), 42).with_checkpoints(Checkpoints::Every(5_000));
    let trace = run_arbirg(&problem, &schedule, &opts)?;

    println!("x* = {xstar:.4?}");
    println!("{:>8}  {:>12}  {:>12}", "k", "‖x̄−x*‖", "residual");
    for r in trace.records.iter().step_by(8) {
        println!(
            "{:>8}  {:>12.3e}  {:>12.3e}",
            r.k,
            r.dist_to_solution.unwrap_or(f64::NAN),
            r.natural_residual
        );
    }
    println!("x̄ = {:.4?}", trace.final_point);
    let slope = trace.rate_slope(MetricField::DistToSolution, None, 0.5)?;
    println!("log-log slope of the distance over the second half: {slope:.3}");
    Ok(())
}
