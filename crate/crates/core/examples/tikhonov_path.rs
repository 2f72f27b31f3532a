//! The Tikhonov trajectory `η ↦ x*_η` of `VI(X, F + η∇f)` and the bound on
//! its successive differences along a decaying `η_k`.

use arbirg::block::dist;
use arbirg::metrics::tikhonov_step_bound;
use arbirg::problems::{degenerate_face_instance, scalar_tikhonov_instance};
use arbirg::solvers::{max_subgradient_norm, tikhonov_trajectory};

fn main() -> arbirg::Result<()> {
    for problem in [scalar_tikhonov_instance(), degenerate_face_instance()] {
        let xstar = problem.known_solution().expect("closed-form instance").to_vec();
        let etas: Vec<f64> = (0..=200).map(|k| ((k + 1) as f64).powf(-0.3)).collect();
        let path = tikhonov_trajectory(&problem, &etas, 1e-12)?;
        let cbar = max_subgradient_norm(&problem, &path);
        let mu = problem.constants().strong_convexity.unwrap_or(1.0);

        println!("{} (C̄_f = {cbar:.4})", problem.name());
        println!("{:>5}  {:>9}  {:>12}  {:>12}  {:>12}", "k", "η_k", "‖x*_η − x*‖", "step", "step bound");
        for k in [1, 2, 5, 10, 20, 50, 100, 200] {
            let step = dist(path[k].as_slice(), path[k - 1].as_slice());
            let bound = tikhonov_step_bound(cbar, mu, etas[k - 1], etas[k]);
            println!(
                "{k:>5}  {:>9.4}  {:>12.4e}  {step:>12.4e}  {bound:>12.4e}",
                etas[k],
                dist(path[k].as_slice(), &xstar)
            );
        }

        // The limit is only reached as η → 0.
        let dyadic: Vec<f64> = (0..=10).map(|i| 0.5f64.powi(i)).collect();
        let tail = tikhonov_trajectory(&problem, &dyadic, 1e-12)?;
        let last = tail.last().unwrap();
        println!("at η = 2^-10: ‖x*_η − x*‖ = {:.3e}\n", dist(last.as_slice(), &xstar));
    }
    Ok(())
}
