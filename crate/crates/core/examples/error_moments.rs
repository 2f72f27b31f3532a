//! Bias and variance of the block-sampling estimates `p_i^{-1} E_i F_i(x)`
//! of `F(x)`: sampled moments next to their exact values.

use arbirg::block::norm;
use arbirg::metrics::{exact_error_moments, rb_error_moments};
use arbirg::problems::paper_cournot_instance;
use arbirg::rng::substream;

fn main() -> arbirg::Result<()> {
    let problem = paper_cournot_instance(3);
    let c = problem.constants();
    let factor = 1.0 / problem.structure().p_min() - 1.0;
    let (cf, cg) = (c.map_bound.unwrap(), c.subgrad_bound.unwrap());
    println!("(1/p_min − 1)·C_F² = {:.4e}, (1/p_min − 1)·C_f² = {:.4e}", factor * cf * cf, factor * cg * cg);

    let mut points = substream(9, 0);
    for p in 0..5 {
        let x = problem.sample_feasible(&mut points).expect("X is bounded");
        let sampled = rb_error_moments(&problem, &x, 100_000, &mut substream(9, 1 + p))?;
        let exact = exact_error_moments(&problem, &x)?;
        println!(
            "point {p}: ‖mean Δ‖ = {:.3e} (stderr {:.3e}), E‖Δ‖² ≈ {:.4e} (exact {:.4e}), E‖δ‖² ≈ {:.4e} (exact {:.4e})",
            norm(&sampled.mean_map),
            sampled.stderr_map,
            sampled.msq_map,
            exact.msq_map,
            sampled.msq_obj,
            exact.msq_obj
        );
    }
    Ok(())
}
