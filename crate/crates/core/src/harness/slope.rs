use crate::error::{RankError, Result};
use crate::harness::trace::RegretTrace;

/// Least-squares line through `(log t, log norm_regret)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub t_start: u64,
    pub t_end: u64,
    pub slope: f64,
    pub intercept: f64,
    /// Root mean squared residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// Ordinary least squares on `(x, y)` pairs; returns `(slope, intercept, rms)`.
pub fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(RankError::Fit(format!(
            "need at least 2 points, have {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(RankError::Fit("all x values coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok((slope, intercept, (ss / n).sqrt()))
}

/// Fits `log(regret/t) ≈ slope·log t + intercept` over rows with
/// `t_start <= t <= t_end`. Non-positive normalized regret has no logarithm
/// and is skipped.
pub fn fit_slope(trace: &RegretTrace, t_start: u64, t_end: u64) -> Result<SlopeFit> {
    let points: Vec<(f64, f64)> = trace
        .rows()
        .iter()
        .filter(|r| r.t >= t_start && r.t <= t_end && r.norm_regret > 0.0)
        .map(|r| ((r.t as f64).ln(), r.norm_regret.ln()))
        .collect();
    let (slope, intercept, residual) = least_squares(&points)?;
    Ok(SlopeFit {
        t_start,
        t_end,
        slope,
        intercept,
        residual,
        points: points.len(),
    })
}
