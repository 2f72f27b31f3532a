//! Averaging randomized block iteratively regularized gradient method.
//!
//! ```text
//! x̄₀ = x₀,  S₀ = γ₀^r
//! for k = 0, 1, …
//!     draw i_k with Prob(i_k = i) = p_i
//!     x_{k+1}^{(i_k)} = P_{X_{i_k}}( x_k^{(i_k)} − γ_k (F_{i_k}(x_k) + η_k ∇̃_{i_k} f(x_k)) )
//!     x_{k+1}^{(i)}   = x_k^{(i)}                for i ≠ i_k
//!     S_{k+1} = S_k + γ_{k+1}^r
//!     x̄_{k+1} = (S_k x̄_k + γ_{k+1}^r x_{k+1}) / S_{k+1}
//! ```

use crate::averaging::SolverState;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::rng::rng_from_seed;
use crate::schedule::Schedule;

use super::trace::{Recorder, RunOptions, RunStatus, RunTrace, TraceMeta};

/// Scratch buffers reused across steps.
#[derive(Debug, Default)]
pub struct StepScratch {
    map_block: Vec<f64>,
    grad_block: Vec<f64>,
    trial: Vec<f64>,
}

/// One block update at iteration `state.k` with step `gamma` and
/// regularization `eta`. Returns the updated block. Only `state.x` and
/// `state.evals` change; the caller advances `k` and the average.
pub fn arbirg_step(state: &mut SolverState, problem: &ProblemSpec, gamma: f64, eta: f64) -> Result<usize> {
    arbirg_step_with(state, problem, gamma, eta, &mut StepScratch::default())
}

pub fn arbirg_step_with(
    state: &mut SolverState,
    problem: &ProblemSpec,
    gamma: f64,
    eta: f64,
    scratch: &mut StepScratch,
) -> Result<usize> {
    let structure = problem.structure();
    let i = structure.sample_block(&mut state.rng);
    let range = structure.range(i);
    let len = range.len();
    scratch.map_block.resize(len, 0.0);
    scratch.grad_block.resize(len, 0.0);
    scratch.trial.resize(len, 0.0);

    let x = state.x.as_slice();
    problem
        .map()
        .eval_block(x, range.clone(), &mut scratch.map_block);
    problem
        .objective()
        .subgradient_block(x, range.clone(), &mut scratch.grad_block);
    state.evals += 1;

    for j in 0..len {
        scratch.trial[j] =
            x[range.start + j] - gamma * (scratch.map_block[j] + eta * scratch.grad_block[j]);
    }
    if scratch.trial.iter().any(|v| !v.is_finite()) {
        let source_name = if scratch.map_block.iter().any(|v| !v.is_finite()) {
            "map"
        } else if scratch.grad_block.iter().any(|v| !v.is_finite()) {
            "objective subgradient"
        } else {
            "update"
        };
        return Err(Error::NonFinite {
            source_name,
            iteration: state.k,
        });
    }
    problem.sets()[i].project_into(&scratch.trial, state.x.block_mut(i));
    Ok(i)
}

/// Runs the method until the budget is exhausted, taking metric snapshots
/// at `x̄_k` on the configured checkpoints.
///
/// A non-finite evaluation stops the run; the trace is returned with
/// [`RunStatus::Aborted`] and the snapshots taken so far.
pub fn run_arbirg(problem: &ProblemSpec, schedule: &Schedule, opts: &RunOptions) -> Result<RunTrace> {
    schedule.validate().into_result()?;
    let mut rng = rng_from_seed(opts.seed);
    let x0 = problem.initial_point(&opts.initial, &mut rng)?;
    let mut state = SolverState::with_rng(x0, schedule.stepsize(0), schedule.r, rng);

    let cost = 1.0 / problem.num_blocks() as f64;
    let max_steps = opts.budget.max_steps(cost);
    if max_steps.is_none() && opts.budget.max_wall.is_none() {
        return Err(Error::Config("budget has no limit".into()));
    }
    let mut cursor = opts.checkpoints.resolve(max_steps);
    let mut recorder = Recorder::new(problem, opts);
    let mut records = Vec::new();
    let mut status = RunStatus::Completed;
    let mut scratch = StepScratch::default();

    loop {
        if cursor.due(state.k) {
            records.push(recorder.record(state.k, state.evals, state.xbar.as_slice())?);
        }
        if max_steps.is_some_and(|m| state.k >= m) || recorder.wall_exceeded() {
            break;
        }
        let gamma = schedule.stepsize(state.k);
        let eta = schedule.regparam(state.k);
        match arbirg_step_with(&mut state, problem, gamma, eta, &mut scratch) {
            Ok(_) => {}
            Err(e @ Error::NonFinite { .. }) => {
                status = RunStatus::Aborted(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
        state.k += 1;
        state.update_average(schedule.stepsize(state.k), schedule.r);
    }

    if opts.record_final
        && status == RunStatus::Completed
        && records.last().is_none_or(|r| r.k != state.k)
    {
        records.push(recorder.record(state.k, state.evals, state.xbar.as_slice())?);
    }

    let mut settings = vec![
        ("gamma0".to_string(), schedule.gamma0.to_string()),
        ("eta0".to_string(), schedule.eta0.to_string()),
        ("a".to_string(), schedule.a.to_string()),
        ("b".to_string(), schedule.b.to_string()),
        ("r".to_string(), schedule.r.to_string()),
        ("mode".to_string(), format!("{:?}", schedule.mode)),
    ];
    if let Some(g) = &opts.gap {
        settings.extend(g.describe());
    }
    Ok(RunTrace {
        meta: TraceMeta {
            solver: "arbirg".into(),
            problem: problem.name().to_string(),
            seed: opts.seed,
            settings,
        },
        records,
        status,
        final_x: state.x.into_inner(),
        final_point: state.xbar.into_inner(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{BlockStructure, BlockVector};
    use crate::maps::{FnMap, SquaredDistance, ZeroMap, ZeroObjective};
    use crate::sets::SetDescriptor;
    use crate::solvers::trace::Budget;
    use std::sync::Arc;

    fn state_at(problem: &ProblemSpec, x: Vec<f64>) -> SolverState {
        let x0 = BlockVector::new(problem.structure().clone(), x).unwrap();
        SolverState::new(x0, 1.0, 0.0, 11)
    }

    #[test]
    fn identity_map_step() {
        let p = ProblemSpec::new(
            "identity",
            BlockStructure::uniform(vec![1]).unwrap(),
            vec![SetDescriptor::whole_space(1)],
            Arc::new(FnMap::new(1, |x: &[f64], o: &mut [f64]| o[0] = x[0])),
            Arc::new(ZeroObjective(1)),
        )
        .unwrap();
        let mut st = state_at(&p, vec![1.0]);
        arbirg_step(&mut st, &p, 0.5, 3.0).unwrap();
        assert_eq!(st.x.as_slice(), &[0.5]);
        assert_eq!(st.evals, 1);
    }

    #[test]
    fn objective_only_step() {
        let p = ProblemSpec::new(
            "half-square",
            BlockStructure::uniform(vec![1]).unwrap(),
            vec![SetDescriptor::uniform_box(1, -1.0, 1.0).unwrap()],
            Arc::new(ZeroMap(1)),
            Arc::new(SquaredDistance::origin(1)),
        )
        .unwrap();
        let mut st = state_at(&p, vec![1.0]);
        arbirg_step(&mut st, &p, 1.0, 1.0).unwrap();
        assert_eq!(st.x.as_slice(), &[0.0]);
    }

    #[test]
    fn only_the_sampled_block_changes() {
        let p = ProblemSpec::new(
            "two-block",
            BlockStructure::uniform(vec![2, 3]).unwrap(),
            vec![
                SetDescriptor::uniform_box(2, -1.0, 1.0).unwrap(),
                SetDescriptor::ball(vec![0.0; 3], 2.0).unwrap(),
            ],
            Arc::new(FnMap::new(5, |x: &[f64], o: &mut [f64]| {
                for i in 0..5 {
                    o[i] = x[(i + 1) % 5] - 0.3 * x[i] + 0.1;
                }
            })),
            Arc::new(SquaredDistance::new(vec![0.5; 5])),
        )
        .unwrap();
        let mut st = state_at(&p, vec![0.2, -0.4, 0.1, 0.3, -0.5]);
        for k in 0..1000 {
            let before = st.x.clone();
            let i = arbirg_step(&mut st, &p, 0.3, 0.7).unwrap();
            let other = 1 - i;
            assert_eq!(before.block(other), st.x.block(other), "step {k}");
            assert!(p.contains(st.x.as_slice(), 1e-9));
        }
    }

    #[test]
    fn nan_aborts_with_diagnostic() {
        let p = ProblemSpec::new(
            "nan",
            BlockStructure::uniform(vec![1]).unwrap(),
            vec![SetDescriptor::whole_space(1)],
            Arc::new(FnMap::new(1, |x: &[f64], o: &mut [f64]| {
                o[0] = if x[0] < 0.5 { f64::NAN } else { x[0] }
            })),
            Arc::new(ZeroObjective(1)),
        )
        .unwrap();
        let sched = Schedule::unbounded(1.0, 1.0, 0.6, 0.3, 0.0);
        let opts = RunOptions::new(Budget::iterations(100), 1)
            .with_initial(crate::problem::InitialPoint::Fixed(vec![1.0]));
        let trace = run_arbirg(&p, &sched, &opts).unwrap();
        match &trace.status {
            RunStatus::Aborted(msg) => assert!(msg.contains("map"), "{msg}"),
            s => panic!("unexpected status {s:?}"),
        }
    }

    #[test]
    fn invalid_schedule_is_rejected() {
        let p = ProblemSpec::new(
            "zero",
            BlockStructure::uniform(vec![1]).unwrap(),
            vec![SetDescriptor::whole_space(1)],
            Arc::new(ZeroMap(1)),
            Arc::new(ZeroObjective(1)),
        )
        .unwrap();
        let sched = Schedule::unbounded(1.0, 1.0, 0.4, 0.3, 0.0);
        let err = run_arbirg(&p, &sched, &RunOptions::new(Budget::iterations(10), 0)).unwrap_err();
        assert!(matches!(err, Error::InvalidSchedule(_)));
    }
}
