//! Euclidean projections onto the block sets: boxes, balls, the orthant
//! and the balanced capacity set of a networked Cournot firm.

use arbirg::sets::{project_balanced, SetDescriptor};

fn main() -> arbirg::Result<()> {
    let v = vec![1.7, -0.4, 3.0];

    let boxed = SetDescriptor::boxed(vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 2.5])?;
    let ball = SetDescriptor::ball(vec![0.0; 3], 1.0)?;
    let orthant = SetDescriptor::nonneg_orthant(3);
    for (name, set) in [("box", &boxed), ("unit ball", &ball), ("orthant", &orthant)] {
        let p = set.project(&v)?;
        // projecting twice changes nothing
        let again = set.project(&p)?;
        println!("{name:>10}: P(v) = {p:.4?}, bounded = {}, idempotent = {}", set.is_bounded(), p == again);
    }

    // One firm at three nodes: generation y_j ∈ [0, cap_j], sales s_j ≥ 0,
    // and total sales equal total generation.
    let caps = [2.0, 1.0, 3.0];
    let y0 = [3.0, -1.0, 1.0];
    let s0 = [0.5, 2.0, -0.5];
    let (y, s) = project_balanced(&caps, &y0, &s0)?;
    println!("balanced: y = {y:.4?}, s = {s:.4?}");
    println!("          Σy − Σs = {:.2e}", y.iter().sum::<f64>() - s.iter().sum::<f64>());

    let balanced = SetDescriptor::balanced_box(caps.to_vec())?;
    let mut joined = y0.to_vec();
    joined.extend_from_slice(&s0);
    let p = balanced.project(&joined)?;
    println!("same projection through the descriptor: {p:.4?}");
    Ok(())
}
