//! Replicated runs, aggregation and CSV output.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::rng::derive_seed;
use crate::solvers::{run_arbirg, run_sr, Budget, Checkpoints, RunOptions, RunStatus, RunTrace, TraceMeta};

use super::config::{ExperimentConfig, SolverPlan};

/// One finished (or aborted) run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub solver: String,
    /// `"arbirg"` or `"sr"`.
    pub method: String,
    pub cell: String,
    pub replication: u64,
    pub seed: u64,
    pub trace: RunTrace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
}

impl Stat {
    /// Sample mean and `s/√n` (0 for a single value).
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stderr = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Stat { mean, stderr }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatePoint {
    pub k: u64,
    pub evals_full_map_equiv: f64,
    pub runs: usize,
    pub f_value: Stat,
    pub gap_estimate: Option<Stat>,
    pub natural_residual: Stat,
    pub dist_to_xstar: Option<Stat>,
    pub wall_ms: Stat,
}

/// Per-checkpoint sample statistics of one (solver, cell) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub solver: String,
    pub method: String,
    pub cell: String,
    pub points: Vec<AggregatePoint>,
    /// `(replication, diagnostic)` of runs left out of the statistics.
    pub aborted: Vec<(u64, String)>,
}

impl AggregateCurve {
    /// `(full-map-equivalents, mean)` of the gap estimate, falling back to
    /// the natural residual when no gap was recorded.
    pub fn accuracy_series(&self) -> Vec<(f64, f64)> {
        let use_gap = self.points.iter().all(|p| p.gap_estimate.is_some()) && !self.points.is_empty();
        self.points
            .iter()
            .map(|p| {
                let v = if use_gap {
                    p.gap_estimate.unwrap().mean
                } else {
                    p.natural_residual.mean
                };
                (p.evals_full_map_equiv, v)
            })
            .collect()
    }

    pub fn f_series(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|p| (p.evals_full_map_equiv, p.f_value.mean))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub problem_name: String,
    pub runs: Vec<RunResult>,
    pub aggregates: Vec<AggregateCurve>,
}

impl ExperimentResult {
    pub fn aborted_runs(&self) -> impl Iterator<Item = &RunResult> {
        self.runs.iter().filter(|r| r.trace.is_aborted())
    }
}

struct Job {
    solver: String,
    method: &'static str,
    cell: String,
    replication: u64,
    seed: u64,
    plan: SolverPlan,
}

/// Budget grid in full-map-equivalents shared by every solver.
fn budget_grid(total: f64, points: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..=points)
        .map(|m| (m as f64 * total / points as f64).round())
        .collect();
    g.dedup();
    g
}

fn run_job(problem: &ProblemSpec, cfg: &ExperimentConfig, job: &Job) -> RunTrace {
    let d = problem.num_blocks() as f64;
    let budget = Budget {
        max_iters: None,
        max_full_map_equiv: cfg.budget.full_map_equivalents,
        max_wall: cfg.budget.wall_seconds.map(Duration::from_secs_f64),
    };
    let per_equiv = match job.plan {
        SolverPlan::Arbirg(_) => d,
        SolverPlan::Sr(_) => 1.0,
    };
    let checkpoints = match cfg.budget.full_map_equivalents {
        Some(total) => Checkpoints::At(
            budget_grid(total, cfg.checkpoints)
                .into_iter()
                .map(|e| (e * per_equiv).round() as u64)
                .collect(),
        ),
        None => Checkpoints::LogSpaced(cfg.checkpoints),
    };
    let mut opts = RunOptions::new(budget, job.seed)
        .with_checkpoints(checkpoints)
        .with_initial(cfg.initial_point());
    opts.record_wall_clock = cfg.record_wall_clock;
    if problem.is_bounded() && cfg.estimate_gap {
        opts.gap = Some(cfg.gap.unwrap_or_default());
    }
    let out = match &job.plan {
        SolverPlan::Arbirg(s) => run_arbirg(problem, s, &opts),
        SolverPlan::Sr(c) => run_sr(problem, c, &opts),
    };
    out.unwrap_or_else(|e| RunTrace {
        meta: TraceMeta {
            solver: job.method.to_string(),
            problem: problem.name().to_string(),
            seed: job.seed,
            settings: vec![],
        },
        records: vec![],
        status: RunStatus::Aborted(e.to_string()),
        final_x: vec![],
        final_point: vec![],
    })
}

/// Runs every (cell, solver, replication) combination.
///
/// Replication `j` of cell `c` uses `derive_seed(master_seed, c, j)` for all
/// solvers, so the solvers of one cell share their starting points. Runs
/// execute on a pool of `workers` threads; results are collected in job
/// order, so the output does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let problem = cfg.problem.build()?;
    let mut jobs = Vec::new();
    for cell in &cfg.cells {
        let cell_id = cell.label();
        for solver in &cfg.solvers {
            let plan = solver.plan(cell)?;
            for j in 0..cfg.replications {
                jobs.push(Job {
                    solver: solver.label(),
                    method: if solver.is_arbirg() { "arbirg" } else { "sr" },
                    cell: cell_id.clone(),
                    replication: j,
                    seed: derive_seed(cfg.master_seed, &cell_id, j),
                    plan: plan.clone(),
                });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let traces: Vec<RunTrace> = pool.install(|| jobs.par_iter().map(|j| run_job(&problem, cfg, j)).collect());
    let runs: Vec<RunResult> = jobs
        .into_iter()
        .zip(traces)
        .map(|(j, trace)| RunResult {
            solver: j.solver,
            method: j.method.to_string(),
            cell: j.cell,
            replication: j.replication,
            seed: j.seed,
            trace,
        })
        .collect();
    let aggregates = aggregate_runs(&runs);
    Ok(ExperimentResult {
        config: cfg.clone(),
        problem_name: problem.name().to_string(),
        runs,
        aggregates,
    })
}

fn opt_stat(values: Vec<Option<f64>>) -> Option<Stat> {
    values.into_iter().collect::<Option<Vec<f64>>>().map(|v| Stat::of(&v))
}

/// Groups runs by (solver, cell) in first-seen order and averages the
/// checkpoints shared by all completed runs of a group.
pub fn aggregate_runs(runs: &[RunResult]) -> Vec<AggregateCurve> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in runs {
        let key = (r.solver.clone(), r.cell.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(solver, cell)| {
            let group: Vec<&RunResult> = runs.iter().filter(|r| r.solver == solver && r.cell == cell).collect();
            let method = group[0].method.clone();
            let aborted = group
                .iter()
                .filter_map(|r| match &r.trace.status {
                    RunStatus::Aborted(m) => Some((r.replication, m.clone())),
                    RunStatus::Completed => None,
                })
                .collect();
            let done: Vec<&RunResult> = group.into_iter().filter(|r| !r.trace.is_aborted()).collect();
            let mut points = Vec::new();
            if let Some(first) = done.first() {
                for rec in &first.trace.records {
                    let recs: Option<Vec<_>> = done
                        .iter()
                        .map(|r| r.trace.records.iter().find(|x| x.k == rec.k))
                        .collect();
                    let Some(recs) = recs else { continue };
                    points.push(AggregatePoint {
                        k: rec.k,
                        evals_full_map_equiv: rec.full_map_equiv,
                        runs: recs.len(),
                        f_value: Stat::of(&recs.iter().map(|r| r.f_value).collect::<Vec<_>>()),
                        gap_estimate: opt_stat(recs.iter().map(|r| r.gap_estimate).collect()),
                        natural_residual: Stat::of(&recs.iter().map(|r| r.natural_residual).collect::<Vec<_>>()),
                        dist_to_xstar: opt_stat(recs.iter().map(|r| r.dist_to_solution).collect()),
                        wall_ms: Stat::of(&recs.iter().map(|r| r.wall_ms).collect::<Vec<_>>()),
                    });
                }
            }
            AggregateCurve {
                solver,
                method,
                cell,
                points,
                aborted,
            }
        })
        .collect()
}

/// Row of a per-run CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub solver: String,
    pub cell: String,
    pub replication: u64,
    pub k: u64,
    pub evals_full_map_equiv: f64,
    pub wall_ms: f64,
    pub f_value: f64,
    pub gap_estimate: Option<f64>,
    pub natural_residual: f64,
    pub dist_to_xstar: Option<f64>,
}

/// Row of `aggregate.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub solver: String,
    pub method: String,
    pub cell: String,
    pub k: u64,
    pub evals_full_map_equiv: f64,
    pub runs: usize,
    pub f_value_mean: f64,
    pub f_value_stderr: f64,
    pub gap_estimate_mean: Option<f64>,
    pub gap_estimate_stderr: Option<f64>,
    pub natural_residual_mean: f64,
    pub natural_residual_stderr: f64,
    pub dist_to_xstar_mean: Option<f64>,
    pub dist_to_xstar_stderr: Option<f64>,
    pub wall_ms_mean: f64,
    pub wall_ms_stderr: f64,
}

/// Row of `runs.csv`: one per run with its status.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStatusRow {
    pub solver: String,
    pub method: String,
    pub cell: String,
    pub replication: u64,
    pub seed: u64,
    pub status: String,
    pub message: String,
    pub records: usize,
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}

pub fn run_file_name(solver: &str, cell: &str, replication: u64) -> String {
    format!("{}__{}__rep{:03}.csv", sanitize(solver), sanitize(cell), replication)
}

pub fn run_rows(run: &RunResult) -> Vec<RunRow> {
    run.trace
        .records
        .iter()
        .map(|r| RunRow {
            solver: run.solver.clone(),
            cell: run.cell.clone(),
            replication: run.replication,
            k: r.k,
            evals_full_map_equiv: r.full_map_equiv,
            wall_ms: r.wall_ms,
            f_value: r.f_value,
            gap_estimate: r.gap_estimate,
            natural_residual: r.natural_residual,
            dist_to_xstar: r.dist_to_solution,
        })
        .collect()
}

pub fn aggregate_rows(curve: &AggregateCurve) -> Vec<AggregateRow> {
    curve
        .points
        .iter()
        .map(|p| AggregateRow {
            solver: curve.solver.clone(),
            method: curve.method.clone(),
            cell: curve.cell.clone(),
            k: p.k,
            evals_full_map_equiv: p.evals_full_map_equiv,
            runs: p.runs,
            f_value_mean: p.f_value.mean,
            f_value_stderr: p.f_value.stderr,
            gap_estimate_mean: p.gap_estimate.map(|s| s.mean),
            gap_estimate_stderr: p.gap_estimate.map(|s| s.stderr),
            natural_residual_mean: p.natural_residual.mean,
            natural_residual_stderr: p.natural_residual.stderr,
            dist_to_xstar_mean: p.dist_to_xstar.map(|s| s.mean),
            dist_to_xstar_stderr: p.dist_to_xstar.map(|s| s.stderr),
            wall_ms_mean: p.wall_ms.mean,
            wall_ms_stderr: p.wall_ms.stderr,
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Output layout under `dir`:
///
/// * `config.toml`: the configuration as run,
/// * `runs/<solver>__<cell>__repNNN.csv`: one trace per run,
/// * `runs.csv`: status of every run,
/// * `settings.csv`: solver settings recorded in the trace metadata,
/// * `aggregate.csv`: per-checkpoint mean and standard error.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let runs_dir = dir.join("runs");
    fs::create_dir_all(&runs_dir)?;
    let mut written = Vec::new();

    let cfg_path = dir.join("config.toml");
    fs::write(&cfg_path, result.config.to_toml_string()?)?;
    written.push(cfg_path);

    for run in &result.runs {
        let path = runs_dir.join(run_file_name(&run.solver, &run.cell, run.replication));
        let rows = run_rows(run);
        if rows.is_empty() {
            // keep the header so the file set is complete
            let mut w = csv::WriterBuilder::new().from_path(&path)?;
            w.write_record([
                "solver",
                "cell",
                "replication",
                "k",
                "evals_full_map_equiv",
                "wall_ms",
                "f_value",
                "gap_estimate",
                "natural_residual",
                "dist_to_xstar",
            ])?;
            w.flush()?;
        } else {
            write_csv(&path, &rows)?;
        }
        written.push(path);
    }

    let status: Vec<RunStatusRow> = result
        .runs
        .iter()
        .map(|r| {
            let (status, message) = match &r.trace.status {
                RunStatus::Completed => ("completed".to_string(), String::new()),
                RunStatus::Aborted(m) => ("aborted".to_string(), m.clone()),
            };
            RunStatusRow {
                solver: r.solver.clone(),
                method: r.method.clone(),
                cell: r.cell.clone(),
                replication: r.replication,
                seed: r.seed,
                status,
                message,
                records: r.trace.records.len(),
            }
        })
        .collect();
    let path = dir.join("runs.csv");
    write_csv(&path, &status)?;
    written.push(path);

    let path = dir.join("settings.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["solver", "cell", "replication", "key", "value"])?;
    for r in &result.runs {
        let rep = r.replication.to_string();
        w.write_record([r.solver.as_str(), r.cell.as_str(), rep.as_str(), "problem", result.problem_name.as_str()])?;
        for (k, v) in &r.trace.meta.settings {
            w.write_record([r.solver.as_str(), r.cell.as_str(), rep.as_str(), k.as_str(), v.as_str()])?;
        }
    }
    w.flush()?;
    written.push(path);

    let rows: Vec<AggregateRow> = result.aggregates.iter().flat_map(aggregate_rows).collect();
    let path = dir.join("aggregate.csv");
    write_csv(&path, &rows)?;
    written.push(path);
    Ok(written)
}

/// Rebuilds the aggregate curves from `aggregate.csv` (and `runs.csv`, when
/// present, for abort diagnostics).
pub fn read_aggregates(dir: &Path) -> Result<Vec<AggregateCurve>> {
    let rows: Vec<AggregateRow> = read_csv(&dir.join("aggregate.csv"))?;
    let mut curves: Vec<AggregateCurve> = Vec::new();
    for r in rows {
        let pos = curves.iter().position(|c| c.solver == r.solver && c.cell == r.cell);
        let idx = match pos {
            Some(i) => i,
            None => {
                curves.push(AggregateCurve {
                    solver: r.solver.clone(),
                    method: r.method.clone(),
                    cell: r.cell.clone(),
                    points: vec![],
                    aborted: vec![],
                });
                curves.len() - 1
            }
        };
        let pair = |m: Option<f64>, s: Option<f64>| m.map(|mean| Stat { mean, stderr: s.unwrap_or(0.0) });
        curves[idx].points.push(AggregatePoint {
            k: r.k,
            evals_full_map_equiv: r.evals_full_map_equiv,
            runs: r.runs,
            f_value: Stat {
                mean: r.f_value_mean,
                stderr: r.f_value_stderr,
            },
            gap_estimate: pair(r.gap_estimate_mean, r.gap_estimate_stderr),
            natural_residual: Stat {
                mean: r.natural_residual_mean,
                stderr: r.natural_residual_stderr,
            },
            dist_to_xstar: pair(r.dist_to_xstar_mean, r.dist_to_xstar_stderr),
            wall_ms: Stat {
                mean: r.wall_ms_mean,
                stderr: r.wall_ms_stderr,
            },
        });
    }
    let status_path = dir.join("runs.csv");
    if status_path.exists() {
        let status: Vec<RunStatusRow> = read_csv(&status_path)?;
        for s in status.into_iter().filter(|s| s.status == "aborted") {
            if let Some(c) = curves.iter_mut().find(|c| c.solver == s.solver && c.cell == s.cell) {
                c.aborted.push((s.replication, s.message));
            }
        }
    }
    Ok(curves)
}
