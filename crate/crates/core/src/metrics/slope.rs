use crate::error::{Error, Result};

/// Least-squares slope of `ln v` against `ln(k + 1)` over points with
/// `k ≥ (1 − window)·k_max`. Nonpositive values are dropped; at least ten
/// points must remain.
pub fn rate_slope(ks: &[f64], vs: &[f64], window: f64) -> Result<f64> {
    if ks.len() != vs.len() {
        return Err(Error::DimensionMismatch {
            expected: ks.len(),
            got: vs.len(),
        });
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::Config(format!("window fraction {window} not in (0, 1]")));
    }
    let kmax = ks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let cutoff = (1.0 - window) * kmax;
    let pts: Vec<(f64, f64)> = ks
        .iter()
        .zip(vs)
        .filter(|(k, v)| **k >= cutoff && **v > 0.0 && v.is_finite())
        .map(|(k, v)| ((k + 1.0).ln(), v.ln()))
        .collect();
    if pts.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "{} positive points in the window, need 10",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all points share one abscissa".into()));
    }
    Ok(sxy / sxx)
}
