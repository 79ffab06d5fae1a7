//! Ordinary least-squares line fits used by the scaling scans.

use serde::Serialize;

use crate::error::{Error, Result};

/// Straight-line fit `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_stderr: f64,
    pub samples: usize,
}

impl LineFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Fit a line through `(x, y)` pairs. Needs at least `min_points` samples and
/// a non-degenerate spread in `x`.
pub fn fit_line(x: &[f64], y: &[f64], min_points: usize) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::Fit(format!("length mismatch: {} abscissae, {} ordinates", x.len(), y.len())));
    }
    let n = x.len();
    if n < min_points.max(2) {
        return Err(Error::Fit(format!("need at least {} points, got {n}", min_points.max(2))));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Fit("non-finite sample".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx <= f64::EPSILON * nf * (mx * mx).max(1.0) {
        return Err(Error::Fit("abscissae are degenerate".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    let slope_stderr = if n > 2 { (ss_res / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        slope_stderr,
        samples: n,
    })
}

/// Power-law fit `y = C x^p` done as a line in log-log coordinates.
pub fn fit_power_law(x: &[f64], y: &[f64], min_points: usize) -> Result<LineFit> {
    if x.iter().chain(y).any(|v| *v <= 0.0) {
        return Err(Error::Fit("power-law fit needs strictly positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly, min_points)
}
