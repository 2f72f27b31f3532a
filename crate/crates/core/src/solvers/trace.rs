use std::time::{Duration, Instant};

use crate::block::dist;
use crate::error::Result;
use crate::metrics::{dual_gap_estimate, natural_residual, rate_slope, GapEstimatorConfig};
use crate::problem::{InitialPoint, ProblemSpec};

/// One metric snapshot, taken at the averaged iterate for the randomized
/// block method and at the current iterate for the two-loop baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub k: u64,
    pub wall_ms: f64,
    /// Block evaluations of the pair (F_i, ∇_i f).
    pub evals: u64,
    pub full_map_equiv: f64,
    pub f_value: f64,
    pub gap_estimate: Option<f64>,
    pub natural_residual: f64,
    pub dist_to_solution: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricField {
    FValue,
    Suboptimality,
    GapEstimate,
    NaturalResidual,
    DistToSolution,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    Aborted(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceMeta {
    pub solver: String,
    pub problem: String,
    pub seed: u64,
    /// Free-form `key = value` settings (schedule, estimator budget, …).
    pub settings: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub meta: TraceMeta,
    pub records: Vec<TraceRecord>,
    pub status: RunStatus,
    /// Last iterate `x_k`.
    pub final_x: Vec<f64>,
    /// Reported point: `x̄_k` for the averaged method, `x_k` otherwise.
    pub final_point: Vec<f64>,
}

impl RunTrace {
    pub fn is_aborted(&self) -> bool {
        matches!(self.status, RunStatus::Aborted(_))
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// `(k, value)` pairs of one metric; records lacking the field are
    /// skipped.
    pub fn series(&self, field: MetricField, optimal_value: Option<f64>) -> Vec<(u64, f64)> {
        self.records
            .iter()
            .filter_map(|r| {
                let v = match field {
                    MetricField::FValue => Some(r.f_value),
                    MetricField::Suboptimality => optimal_value.map(|f| r.f_value - f),
                    MetricField::GapEstimate => r.gap_estimate,
                    MetricField::NaturalResidual => Some(r.natural_residual),
                    MetricField::DistToSolution => r.dist_to_solution,
                }?;
                Some((r.k, v))
            })
            .collect()
    }

    /// Log-log slope of a metric against `k + 1` over the trailing
    /// `window` fraction of records.
    pub fn rate_slope(&self, field: MetricField, optimal_value: Option<f64>, window: f64) -> Result<f64> {
        let s = self.series(field, optimal_value);
        let ks: Vec<f64> = s.iter().map(|(k, _)| *k as f64).collect();
        let vs: Vec<f64> = s.iter().map(|(_, v)| *v).collect();
        rate_slope(&ks, &vs, window)
    }
}

/// Termination limits; the first one reached ends the run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Budget {
    /// Solver steps: block updates for the randomized method, map
    /// evaluations for the two-loop baseline.
    pub max_iters: Option<u64>,
    pub max_full_map_equiv: Option<f64>,
    pub max_wall: Option<Duration>,
}

impl Budget {
    pub fn iterations(n: u64) -> Self {
        Self {
            max_iters: Some(n),
            ..Default::default()
        }
    }

    pub fn full_map_equivalents(e: f64) -> Self {
        Self {
            max_full_map_equiv: Some(e),
            ..Default::default()
        }
    }

    /// Largest step count allowed when one step costs `cost` full-map
    /// equivalents.
    pub(crate) fn max_steps(&self, cost: f64) -> Option<u64> {
        let by_evals = self
            .max_full_map_equiv
            .map(|e| (e / cost + 1e-9).floor() as u64);
        match (self.max_iters, by_evals) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// When to take metric snapshots, in solver steps.
#[derive(Debug, Clone, PartialEq)]
pub enum Checkpoints {
    /// Every `n` steps, starting at 0.
    Every(u64),
    /// About this many points geometrically spaced in `[1, max steps]`.
    LogSpaced(usize),
    /// Sorted explicit step counts.
    At(Vec<u64>),
}

impl Default for Checkpoints {
    fn default() -> Self {
        Checkpoints::LogSpaced(200)
    }
}

impl Checkpoints {
    /// Every `⌈max/200⌉` steps.
    pub fn default_for(max_steps: u64) -> Self {
        Checkpoints::Every(max_steps.div_ceil(200).max(1))
    }

    pub(crate) fn resolve(&self, max_steps: Option<u64>) -> CheckpointCursor {
        match self {
            Checkpoints::Every(n) => CheckpointCursor::Every {
                step: (*n).max(1),
                next: 0,
            },
            Checkpoints::LogSpaced(count) => {
                let max = max_steps.unwrap_or(1_000_000).max(1);
                let count = (*count).max(2);
                let mut pts = vec![0u64];
                let ratio = (max as f64).ln() / (count - 1) as f64;
                for i in 0..count {
                    let k = ((i as f64) * ratio).exp().round() as u64;
                    pts.push(k.min(max));
                }
                pts.push(max);
                pts.sort_unstable();
                pts.dedup();
                CheckpointCursor::List { pts, pos: 0 }
            }
            Checkpoints::At(list) => {
                let mut pts = list.clone();
                pts.sort_unstable();
                pts.dedup();
                CheckpointCursor::List { pts, pos: 0 }
            }
        }
    }
}

pub(crate) enum CheckpointCursor {
    Every { step: u64, next: u64 },
    List { pts: Vec<u64>, pos: usize },
}

impl CheckpointCursor {
    /// True when a snapshot is due at step `k`; advances past `k`.
    pub(crate) fn due(&mut self, k: u64) -> bool {
        match self {
            CheckpointCursor::Every { step, next } => {
                if k >= *next {
                    *next = (k / *step + 1) * *step;
                    true
                } else {
                    false
                }
            }
            CheckpointCursor::List { pts, pos } => {
                let mut hit = false;
                while *pos < pts.len() && pts[*pos] <= k {
                    hit |= pts[*pos] == k;
                    *pos += 1;
                }
                hit
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub budget: Budget,
    pub seed: u64,
    pub checkpoints: Checkpoints,
    /// Dual gap estimation at each snapshot; `None` skips it.
    pub gap: Option<GapEstimatorConfig>,
    pub initial: InitialPoint,
    /// When false, `wall_ms` is written as 0 so traces are reproducible
    /// byte for byte.
    pub record_wall_clock: bool,
    /// Take a final snapshot when the run stops off-checkpoint.
    pub record_final: bool,
}

impl RunOptions {
    pub fn new(budget: Budget, seed: u64) -> Self {
        let checkpoints = match budget.max_iters {
            Some(n) => Checkpoints::default_for(n),
            None => Checkpoints::default(),
        };
        Self {
            budget,
            seed,
            checkpoints,
            gap: None,
            initial: InitialPoint::default(),
            record_wall_clock: true,
            record_final: true,
        }
    }

    pub fn with_checkpoints(mut self, checkpoints: Checkpoints) -> Self {
        self.checkpoints = checkpoints;
        self
    }

    pub fn with_gap(mut self, gap: GapEstimatorConfig) -> Self {
        self.gap = Some(gap);
        self
    }

    pub fn with_initial(mut self, initial: InitialPoint) -> Self {
        self.initial = initial;
        self
    }

    pub fn without_wall_clock(mut self) -> Self {
        self.record_wall_clock = false;
        self
    }
}

/// Shared snapshot logic.
pub(crate) struct Recorder<'a> {
    problem: &'a ProblemSpec,
    opts: &'a RunOptions,
    start: Instant,
    snapshot: u64,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(problem: &'a ProblemSpec, opts: &'a RunOptions) -> Self {
        Self {
            problem,
            opts,
            start: Instant::now(),
            snapshot: 0,
        }
    }

    pub(crate) fn wall_exceeded(&self) -> bool {
        self.opts
            .budget
            .max_wall
            .is_some_and(|w| self.start.elapsed() >= w)
    }

    pub(crate) fn record(&mut self, k: u64, evals: u64, point: &[f64]) -> Result<TraceRecord> {
        let p = self.problem;
        let gap_estimate = match &self.opts.gap {
            Some(cfg) => {
                // Each snapshot gets its own estimator stream.
                let cfg = cfg.reseeded(cfg.seed ^ self.opts.seed.rotate_left(17) ^ self.snapshot);
                Some(dual_gap_estimate(p, point, &cfg)?)
            }
            None => None,
        };
        self.snapshot += 1;
        let wall_ms = if self.opts.record_wall_clock {
            self.start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        };
        Ok(TraceRecord {
            k,
            wall_ms,
            evals,
            full_map_equiv: evals as f64 / p.num_blocks() as f64,
            f_value: p.objective_value(point),
            gap_estimate,
            natural_residual: natural_residual(p, point)?,
            dist_to_solution: p.known_solution().map(|xs| dist(point, xs)),
        })
    }
}
