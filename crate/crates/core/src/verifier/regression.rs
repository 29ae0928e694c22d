//! Log-log least squares for entries whose constants are unspecified.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default allowance on the fitted slope.
pub const SLOPE_TOLERANCE: f64 = 0.1;

/// Ordinary least squares fit of log(value) on log(n).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residuals (0 with 2 points).
    pub slope_stderr: f64,
}

/// Fits log(values) = intercept + slope log(ns). Needs at least 3 distinct
/// n and strictly positive values.
pub fn fit_log_log(ns: &[usize], values: &[f64]) -> Result<LogLogFit> {
    if ns.len() != values.len() {
        return Err(Error::DimensionMismatch(ns.len(), values.len()));
    }
    let mut distinct = ns.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateRegression(format!("{} distinct n values, need at least 3", distinct.len())));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateRegression(format!("nonpositive estimate {v}")));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let slope_stderr = if xs.len() > 2 { (rss / (m - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(LogLogFit { slope, intercept, slope_stderr })
}

/// Decision rule for a rate claim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRule {
    pub target_slope: f64,
    pub tolerance: f64,
    /// Theta claims also bound the slope from below.
    pub two_sided: bool,
}

impl RateRule {
    pub fn upper(target_slope: f64) -> Self {
        Self { target_slope, tolerance: SLOPE_TOLERANCE, two_sided: false }
    }

    pub fn exact_order(target_slope: f64) -> Self {
        Self { target_slope, tolerance: SLOPE_TOLERANCE, two_sided: true }
    }

    pub fn accepts(&self, slope: f64) -> bool {
        if self.two_sided {
            (slope - self.target_slope).abs() <= self.tolerance
        } else {
            slope <= self.target_slope + self.tolerance
        }
    }
}

/// One point of a decay curve: estimate and constant-free bound shape at n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub n: usize,
    pub lhs: f64,
    pub stderr: f64,
    pub shape: f64,
}

impl CurvePoint {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.shape
    }
}

/// Fitted decay of an estimate against the slope of its bound shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub fit: LogLogFit,
    pub rule: RateRule,
    pub pass: bool,
    pub points: Vec<CurvePoint>,
}

/// Fits the estimates of `points`; the target slope is the least-squares
/// slope of the bound shape over the same n unless `target` is given.
pub fn rate_regression(points: &[CurvePoint], target: Option<f64>, two_sided: bool) -> Result<RateFit> {
    let ns: Vec<usize> = points.iter().map(|p| p.n).collect();
    let lhs: Vec<f64> = points.iter().map(|p| p.lhs).collect();
    let fit = fit_log_log(&ns, &lhs)?;
    let target_slope = match target {
        Some(t) => t,
        None => fit_log_log(&ns, &points.iter().map(|p| p.shape).collect::<Vec<_>>())?.slope,
    };
    let rule = RateRule { target_slope, tolerance: SLOPE_TOLERANCE, two_sided };
    Ok(RateFit { fit, rule, pass: rule.accepts(fit.slope), points: points.to_vec() })
}
