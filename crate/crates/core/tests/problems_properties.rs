//! Problem-builder checks: analytic derivatives against finite differences,
//! monotonicity of the maps, convexity of the objectives, block/full
//! evaluation consistency and the reference solutions.

use arbirg::problems::{
    complementarity_violation, paper_cournot_instance, random_l1_box_instance, random_penalized_program,
    random_strongly_convex_instance,
};
use arbirg::rng::rng_from_seed;
use arbirg::ProblemSpec;
use proptest::prelude::*;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Feasible points pulled towards the average of many samples, so every
/// coordinate of the Cournot instances is strictly positive and finite
/// differences stay on one smooth piece.
fn interior_pair(problem: &ProblemSpec, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = rng_from_seed(seed ^ 0x5eed);
    let n = problem.dim();
    let mut center = vec![0.0; n];
    for _ in 0..50 {
        let s = problem.sample_feasible(&mut rng).unwrap();
        center.iter_mut().zip(&s).for_each(|(c, v)| *c += v / 50.0);
    }
    let (x, y) = feasible_pair(problem, seed);
    let pull = |p: Vec<f64>| p.iter().zip(&center).map(|(a, c)| 0.8 * a + 0.2 * c).collect();
    (pull(x), pull(y))
}

fn feasible_pair(problem: &ProblemSpec, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let x = problem.sample_feasible(&mut rng).unwrap();
    let y = problem.sample_feasible(&mut rng).unwrap();
    (x, y)
}

/// Central-difference `J_F(x)ᵀ v`.
fn fd_jtv(problem: &ProblemSpec, x: &[f64], v: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = 1e-5 * (1.0 + x[j].abs());
        xp[j] = x[j] + h;
        let fp = problem.eval_map(&xp);
        xp[j] = x[j] - h;
        let fm = problem.eval_map(&xp);
        xp[j] = x[j];
        out[j] = fp.iter().zip(&fm).zip(v).map(|((a, b), w)| (a - b) / (2.0 * h) * w).sum();
    }
    out
}

fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|j| {
            let h = 1e-6 * (1.0 + x[j].abs());
            xp[j] = x[j] + h;
            let up = f(&xp);
            xp[j] = x[j] - h;
            let down = f(&xp);
            xp[j] = x[j];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn assert_block_consistent(problem: &ProblemSpec, x: &[f64]) -> Result<(), TestCaseError> {
    let full_f = problem.eval_map(x);
    let full_g = problem.eval_subgradient(x);
    for i in 0..problem.num_blocks() {
        let range = problem.structure().range(i);
        let mut bf = vec![0.0; range.len()];
        let mut bg = vec![0.0; range.len()];
        problem.map().eval_block(x, range.clone(), &mut bf);
        problem.objective().subgradient_block(x, range.clone(), &mut bg);
        prop_assert_eq!(&bf[..], &full_f[range.clone()]);
        prop_assert_eq!(&bg[..], &full_g[range]);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cournot_map(seed in any::<u64>(), inst in 0u64..5) {
        let problem = paper_cournot_instance(inst);
        let (x, y) = interior_pair(&problem, seed);
        prop_assert!(problem.contains(&x, 1e-9));
        assert_block_consistent(&problem, &x)?;

        let fx = problem.eval_map(&x);
        let fy = problem.eval_map(&y);
        let diff: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let fdiff: Vec<f64> = fx.iter().zip(&fy).map(|(a, b)| a - b).collect();
        prop_assert!(dot(&fdiff, &diff) >= -1e-9 * (1.0 + dot(&diff, &diff)), "not monotone");

        let v = problem.sample_feasible(&mut rng_from_seed(seed ^ 1)).unwrap();
        let mut exact = vec![0.0; x.len()];
        problem.map().jacobian_transpose_product(&x, &v, &mut exact);
        let approx = fd_jtv(&problem, &x, &v);
        for (a, b) in exact.iter().zip(&approx) {
            prop_assert!((a - b).abs() <= 1e-4 * (1.0 + a.abs()), "JᵀV {a} vs {b}");
        }
    }

    #[test]
    fn marshallian_objective(seed in any::<u64>(), t in 0.0..1.0f64) {
        let problem = paper_cournot_instance(1);
        let (x, y) = interior_pair(&problem, seed);
        let g = problem.eval_subgradient(&x);
        let fd = fd_gradient(|z| problem.objective_value(z), &x);
        for (a, b) in g.iter().zip(&fd) {
            prop_assert!((a - b).abs() <= 1e-4 * (1.0 + a.abs()), "∇f {a} vs {b}");
        }
        let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let chord = t * problem.objective_value(&x) + (1.0 - t) * problem.objective_value(&y);
        prop_assert!(problem.objective_value(&z) <= chord + 1e-9 * (1.0 + chord.abs()), "not convex");
    }

    #[test]
    fn penalized_map_is_the_penalty_gradient(seed in 0u64..500, pt in any::<u64>()) {
        let prog = random_penalized_program(seed);
        let problem = &prog.problem;
        let (x, y) = feasible_pair(problem, pt);
        assert_block_consistent(problem, &x)?;
        let f = problem.eval_map(&x);
        let fd = fd_gradient(|z| prog.map.potential(z), &x);
        for (a, b) in f.iter().zip(&fd) {
            prop_assert!((a - b).abs() <= 1e-5 * (1.0 + a.abs()), "∇φ {a} vs {b}");
        }
        let mut exact = vec![0.0; x.len()];
        problem.map().jacobian_transpose_product(&x, &y, &mut exact);
        let approx = fd_jtv(problem, &x, &y);
        for (a, b) in exact.iter().zip(&approx) {
            prop_assert!((a - b).abs() <= 1e-4 * (1.0 + a.abs()), "JᵀV {a} vs {b}");
        }
        // the anchor is feasible, so it solves the penalized VI
        prop_assert!(prog.map.equality_residual(&prog.anchor) <= 1e-12);
        prop_assert!(prog.map.max_violation(&prog.anchor) < 0.0 || prog.map.max_violation(&prog.anchor) == f64::NEG_INFINITY);
    }

    #[test]
    fn l1_box_constants_bound_the_map(seed in 0u64..50, pt in any::<u64>()) {
        let problem = random_l1_box_instance(seed);
        let c = *problem.constants();
        let (x, _) = feasible_pair(&problem, pt);
        assert_block_consistent(&problem, &x)?;
        let fx = problem.eval_map(&x);
        prop_assert!(dot(&fx, &fx).sqrt() <= c.map_bound.unwrap() * (1.0 + 1e-12));
        let g = problem.eval_subgradient(&x);
        prop_assert!(dot(&g, &g).sqrt() <= c.subgrad_bound.unwrap() * (1.0 + 1e-12));
        prop_assert!(dot(&x, &x).sqrt() <= c.norm_bound.unwrap() * (1.0 + 1e-12));
    }
}

#[test]
fn l1_box_reference_solution_is_feasible_and_consistent() {
    for seed in 0..20 {
        let problem = random_l1_box_instance(seed);
        let xstar = problem.known_solution().unwrap();
        let fstar = problem.optimal_value().unwrap();
        assert!(problem.contains(xstar, 1e-9));
        // F(x*) = Aᵀ(Ax* − b) vanishes exactly when Ax* = b
        let f = problem.eval_map(xstar);
        assert!(dot(&f, &f).sqrt() <= 1e-8, "seed {seed}: ‖F(x*)‖ = {}", dot(&f, &f).sqrt());
        assert!((problem.objective_value(xstar) - fstar).abs() <= 1e-9);
    }
}

#[test]
fn strongly_convex_reference_solution_solves_the_lcp() {
    for seed in 0..20 {
        let problem = random_strongly_convex_instance(seed);
        let xstar = problem.known_solution().unwrap();
        let (nx, nf, comp) = complementarity_violation(&problem, xstar);
        assert!(nx <= 1e-9 && nf <= 1e-8 && comp <= 1e-8, "seed {seed}: {nx} {nf} {comp}");
    }
}
