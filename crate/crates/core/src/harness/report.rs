//! Summary tables built from aggregate curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{rate_bound_threshold, rate_bounds, RateBoundConstants};
use crate::schedule::Schedule;

use super::experiment::AggregateCurve;

/// Linear interpolation of `series` (sorted by x) at `x`.
fn interpolate(series: &[(f64, f64)], x: f64) -> f64 {
    match series.iter().position(|p| p.0 >= x) {
        Some(0) => series[0].1,
        Some(i) => {
            let (x0, y0) = series[i - 1];
            let (x1, y1) = series[i];
            if x1 == x0 {
                y1
            } else {
                y0 + (y1 - y0) * (x - x0) / (x1 - x0)
            }
        }
        None => series.last().map_or(f64::NAN, |p| p.1),
    }
}

/// Puts two curves on a common grid: the abscissae of the coarser curve
/// that fall inside both ranges, with the finer curve interpolated.
pub fn align(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let lo = a[0].0.max(b[0].0);
    let hi = a.last().unwrap().0.min(b.last().unwrap().0);
    let (coarse, a_is_coarse) = if a.len() <= b.len() { (a, true) } else { (b, false) };
    coarse
        .iter()
        .filter(|p| p.0 >= lo && p.0 <= hi)
        .map(|&(x, y)| {
            if a_is_coarse {
                (x, y, interpolate(b, x))
            } else {
                (x, interpolate(a, x), y)
            }
        })
        .collect()
}

/// True when `a < b` at every common grid point in the trailing `fraction`
/// of the shared budget axis.
pub fn dominates(a: &[(f64, f64)], b: &[(f64, f64)], fraction: f64) -> bool {
    let grid = align(a, b);
    let Some(hi) = grid.last().map(|p| p.0) else {
        return false;
    };
    let cutoff = (1.0 - fraction) * hi;
    let tail: Vec<_> = grid.iter().filter(|p| p.0 >= cutoff).collect();
    !tail.is_empty() && tail.iter().all(|(_, ya, yb)| ya < yb)
}

/// Trapezoidal area under `ln y` against the budget axis.
pub fn area_under_log(series: &[(f64, f64)]) -> f64 {
    series
        .windows(2)
        .map(|w| {
            let l0 = w[0].1.max(f64::MIN_POSITIVE).ln();
            let l1 = w[1].1.max(f64::MIN_POSITIVE).ln();
            0.5 * (l0 + l1) * (w[1].0 - w[0].0)
        })
        .sum()
}

/// `(max − min)/|mean|` of the values in the trailing `fraction` of the
/// budget axis.
pub fn relative_oscillation(series: &[(f64, f64)], fraction: f64) -> f64 {
    let Some(hi) = series.last().map(|p| p.0) else {
        return f64::NAN;
    };
    let lo = series[0].0;
    let cutoff = hi - fraction * (hi - lo);
    let tail: Vec<f64> = series.iter().filter(|p| p.0 >= cutoff).map(|p| p.1).collect();
    let max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    (max - min) / mean.abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub cell: String,
    pub solver: String,
    pub baseline: String,
    /// `"gap"` or `"natural_residual"`.
    pub accuracy_metric: String,
    pub final_accuracy: f64,
    pub baseline_final_accuracy: f64,
    pub final_f: f64,
    pub baseline_final_f: f64,
    pub area_log_accuracy: f64,
    pub baseline_area_log_accuracy: f64,
    /// Accuracy curve strictly below the baseline over the trailing half
    /// of the budget.
    pub dominates: bool,
    /// `final_accuracy / baseline_final_accuracy`.
    pub ratio: f64,
    /// Relative oscillation of the mean objective over the trailing 20%.
    pub f_oscillation: f64,
}

/// Compares every non-baseline curve of a cell with each `sr` curve of the
/// same cell.
pub fn compare_report(curves: &[AggregateCurve]) -> Result<Vec<CompareRow>> {
    let mut rows = Vec::new();
    for c in curves.iter().filter(|c| c.method != "sr") {
        for base in curves.iter().filter(|b| b.method == "sr" && b.cell == c.cell) {
            rows.push(compare_pair(c, base)?);
        }
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData(
            "comparison needs an sr curve and another solver in the same cell".into(),
        ));
    }
    Ok(rows)
}

pub fn compare_pair(c: &AggregateCurve, base: &AggregateCurve) -> Result<CompareRow> {
    let a = c.accuracy_series();
    let b = base.accuracy_series();
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "curves {} / {} in cell {} have too few points",
            c.solver, base.solver, c.cell
        )));
    }
    let gap = |cur: &AggregateCurve| cur.points.iter().all(|p| p.gap_estimate.is_some());
    let metric = if gap(c) && gap(base) { "gap" } else { "natural_residual" };
    let fa = c.f_series();
    let fb = base.f_series();
    let last = |s: &[(f64, f64)]| s.last().map_or(f64::NAN, |p| p.1);
    Ok(CompareRow {
        cell: c.cell.clone(),
        solver: c.solver.clone(),
        baseline: base.solver.clone(),
        accuracy_metric: metric.into(),
        final_accuracy: last(&a),
        baseline_final_accuracy: last(&b),
        final_f: last(&fa),
        baseline_final_f: last(&fb),
        area_log_accuracy: area_under_log(&a),
        baseline_area_log_accuracy: area_under_log(&b),
        dominates: dominates(&a, &b, 0.5),
        ratio: last(&a) / last(&b),
        f_oscillation: relative_oscillation(&fa, 0.2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub solver: String,
    pub cell: String,
    pub n: u64,
    pub subopt_mean: f64,
    pub subopt_stderr: f64,
    pub subopt_bound: f64,
    pub subopt_violation: bool,
    pub gap_mean: Option<f64>,
    pub gap_stderr: Option<f64>,
    pub gap_bound: f64,
    pub gap_violation: bool,
}

/// Sample means against the bounded-X rate bounds at every recorded
/// `N ≥ 2^{2/(1−r)} − 1`. A row is flagged when `mean − 3·stderr > bound`.
pub fn bound_check_report(
    curve: &AggregateCurve,
    constants: &RateBoundConstants,
    schedule: &Schedule,
    optimal_value: f64,
) -> Result<Vec<BoundRow>> {
    let min = rate_bound_threshold(schedule.r);
    curve
        .points
        .iter()
        .filter(|p| p.k >= min)
        .map(|p| {
            let b = rate_bounds(constants, schedule, p.k)?;
            let subopt_mean = p.f_value.mean - optimal_value;
            let subopt_stderr = p.f_value.stderr;
            let gap_violation = p
                .gap_estimate
                .is_some_and(|g| g.mean - 3.0 * g.stderr > b.gap);
            Ok(BoundRow {
                solver: curve.solver.clone(),
                cell: curve.cell.clone(),
                n: p.k,
                subopt_mean,
                subopt_stderr,
                subopt_bound: b.subopt,
                subopt_violation: subopt_mean - 3.0 * subopt_stderr > b.subopt,
                gap_mean: p.gap_estimate.map(|g| g.mean),
                gap_stderr: p.gap_estimate.map(|g| g.stderr),
                gap_bound: b.gap,
                gap_violation,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::experiment::{AggregatePoint, Stat};

    fn curve(method: &str, vals: &[f64]) -> AggregateCurve {
        AggregateCurve {
            solver: method.into(),
            method: method.into(),
            cell: "c".into(),
            points: vals
                .iter()
                .enumerate()
                .map(|(i, &v)| AggregatePoint {
                    k: i as u64 * 10,
                    evals_full_map_equiv: i as f64,
                    runs: 1,
                    f_value: Stat { mean: v, stderr: 0.0 },
                    gap_estimate: Some(Stat { mean: v, stderr: 0.0 }),
                    natural_residual: Stat { mean: v, stderr: 0.0 },
                    dist_to_xstar: None,
                    wall_ms: Stat { mean: 0.0, stderr: 0.0 },
                })
                .collect(),
            aborted: vec![],
        }
    }

    #[test]
    fn identical_curves_do_not_dominate() {
        let v = [4.0, 3.0, 2.0, 1.5, 1.0];
        let rows = compare_report(&[curve("arbirg", &v), curve("sr", &v)]).unwrap();
        assert!(!rows[0].dominates);
        assert_eq!(rows[0].ratio, 1.0);
    }

    #[test]
    fn half_curve_dominates() {
        let v = [4.0, 3.0, 2.0, 1.5, 1.0];
        let h: Vec<f64> = v.iter().map(|x| 0.5 * x).collect();
        let rows = compare_report(&[curve("arbirg", &h), curve("sr", &v)]).unwrap();
        assert!(rows[0].dominates);
        assert_eq!(rows[0].ratio, 0.5);
    }

    #[test]
    fn resampling_onto_coarser_grid() {
        let a = vec![(0.0, 1.0), (2.0, 3.0)];
        let b = vec![(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)];
        assert_eq!(align(&a, &b), vec![(0.0, 1.0, 0.0), (2.0, 3.0, 2.0)]);
        assert_eq!(align(&b, &a), vec![(0.0, 0.0, 1.0), (2.0, 2.0, 3.0)]);
    }

    #[test]
    fn oscillation_of_tail() {
        let s: Vec<(f64, f64)> = (0..=10).map(|i| (i as f64, if i >= 8 { 10.0 + (i % 2) as f64 * 0.1 } else { 0.0 })).collect();
        let o = relative_oscillation(&s, 0.2);
        assert!((o - 0.1 / (30.1 / 3.0)).abs() < 1e-12, "{o}");
    }

    #[test]
    fn bound_rows_skip_threshold() {
        let c = curve("arbirg", &[0.0, 0.0, 0.0]);
        let consts = RateBoundConstants {
            norm_bound: 1.0,
            map_bound: 1.0,
            subgrad_bound: 1.0,
            p_min: 0.5,
        };
        let rows = bound_check_report(&c, &consts, &Schedule::bounded(1.0, 1.0, 0.25, 0.5), 0.0).unwrap();
        assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![20]);
        assert!(!rows[0].subopt_violation && !rows[0].gap_violation);
    }
}
