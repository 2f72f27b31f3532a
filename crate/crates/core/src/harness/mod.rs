//! Experiment harness: configuration, replicated runs with derived seeds,
//! aggregation, CSV and SVG output, comparison and bound reports, and the
//! diagnostic suites behind the `arbirg` command-line tool.

pub mod config;
pub mod diag;
pub mod experiment;
pub mod report;
pub mod svg;

pub use config::{BudgetConfig, CellConfig, ExperimentConfig, ProblemConfig, SolverConfig, SolverPlan};
pub use diag::{run_diagnostics, DiagOptions, DiagOutcome};
pub use experiment::{
    aggregate_runs, read_aggregates, run_experiment, write_outputs, AggregateCurve, AggregatePoint,
    ExperimentResult, RunResult, Stat,
};
pub use report::{bound_check_report, compare_report, relative_oscillation, BoundRow, CompareRow};
pub use svg::line_chart;

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::RateBoundConstants;

/// Bound-check rows for every aRB-IRG curve of an experiment, using the
/// constants and optimal value stored on the configured problem.
pub fn bounds_for_experiment(cfg: &ExperimentConfig, curves: &[AggregateCurve]) -> Result<Vec<BoundRow>> {
    let problem = cfg.problem.build()?;
    let constants = RateBoundConstants::from_problem(&problem)?;
    let fstar = problem
        .optimal_value()
        .ok_or_else(|| Error::MissingReference(format!("problem '{}' has no optimal value", problem.name())))?;
    let mut rows = Vec::new();
    for solver in cfg.solvers.iter().filter(|s| s.is_arbirg()) {
        let label = solver.label();
        for cell in &cfg.cells {
            let SolverPlan::Arbirg(schedule) = solver.plan(cell)? else {
                continue;
            };
            let cell_label = cell.label();
            if let Some(curve) = curves.iter().find(|c| c.solver == label && c.cell == cell_label) {
                rows.extend(bound_check_report(curve, &constants, &schedule, fstar)?);
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData(
            "no aRB-IRG curve has checkpoints past the bound threshold".into(),
        ));
    }
    Ok(rows)
}

/// One accuracy chart and one objective chart per cell, as
/// `<dir>/<cell>_accuracy.svg` and `<dir>/<cell>_objective.svg`.
pub fn write_svgs(curves: &[AggregateCurve], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut cells: Vec<&str> = curves.iter().map(|c| c.cell.as_str()).collect();
    cells.sort_unstable();
    cells.dedup();
    let mut written = Vec::new();
    for cell in cells {
        let in_cell: Vec<&AggregateCurve> = curves.iter().filter(|c| c.cell == cell).collect();
        let acc: Vec<(String, Vec<(f64, f64)>)> =
            in_cell.iter().map(|c| (c.solver.clone(), c.accuracy_series())).collect();
        let obj: Vec<(String, Vec<(f64, f64)>)> = in_cell.iter().map(|c| (c.solver.clone(), c.f_series())).collect();
        let path = dir.join(format!("{cell}_accuracy.svg"));
        std::fs::write(&path, line_chart(cell, "full map evaluations", "accuracy", &acc, true))?;
        written.push(path);
        let path = dir.join(format!("{cell}_objective.svg"));
        std::fs::write(&path, line_chart(cell, "full map evaluations", "f(x̄)", &obj, false))?;
        written.push(path);
    }
    Ok(written)
}
