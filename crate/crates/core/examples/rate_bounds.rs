//! Theoretical bounds on `E[f(x̄_N)] − f*` and `E[GAP(x̄_N)]` for bounded X,
//! next to the averages of a few replications of aRB-IRG on an ℓ1 program
//! over `{Ax = b} ∩ [−1, 1]^8`.

use arbirg::metrics::{rate_bound_threshold, rate_bounds, GapEstimatorConfig, RateBoundConstants};
use arbirg::problems::random_l1_box_instance;
use arbirg::rng::derive_seed;
use arbirg::solvers::{run_arbirg, Budget, Checkpoints, RunOptions};
use arbirg::Schedule;

fn main() -> arbirg::Result<()> {
    let problem = random_l1_box_instance(5);
    let constants = RateBoundConstants::from_problem(&problem)?;
    let fstar = problem.optimal_value().expect("oracle value");
    println!("{}: f* = {fstar:.6}, {constants:?}", problem.name());

    let ns: Vec<u64> = vec![100, 1_000, 10_000, 50_000];
    let reps = 8;
    for r in [0.0, 0.5] {
        let schedule = Schedule::bounded(1.0, 1.0, 0.25, r);
        println!("\nr = {r} (bounds valid from N = {})", rate_bound_threshold(r));
        let mut sums = vec![(0.0, 0.0); ns.len()];
        for rep in 0..reps {
            let opts = RunOptions::new(Budget::iterations(*ns.last().unwrap()), derive_seed(1, "rate-bounds", rep))
                .with_checkpoints(Checkpoints::At(ns.clone()))
                .with_gap(GapEstimatorConfig::default());
            let trace = run_arbirg(&problem, &schedule, &opts)?;
            for (s, rec) in sums.iter_mut().zip(&trace.records) {
                s.0 += rec.f_value - fstar;
                s.1 += rec.gap_estimate.unwrap_or(0.0);
            }
        }
        println!("{:>7}  {:>12}  {:>12}  {:>12}  {:>12}", "N", "mean subopt", "bound", "mean gap", "bound");
        for (n, s) in ns.iter().zip(&sums) {
            let b = rate_bounds(&constants, &schedule, *n)?;
            let k = reps as f64;
            println!("{n:>7}  {:>12.4e}  {:>12.4e}  {:>12.4e}  {:>12.4e}", s.0 / k, b.subopt, s.1 / k, b.gap);
        }
    }
    Ok(())
}
