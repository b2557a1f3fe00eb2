use crate::error::{Error, Result};
use crate::exponents::{critical_rate, subcritical_rate, ProblemIndex};

/// Minimum converged rows for a scaling fit.
pub const MIN_FIT_POINTS: usize = 4;
pub const DEFAULT_FIT_TOL: f64 = 0.2;
pub const MIN_DETERMINATION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr_slope: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares y = intercept + slope x.
pub fn ols(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InvalidInput("x and y lengths differ".into()));
    }
    if n < 2 {
        return Err(Error::InsufficientData { got: n, need: 2 });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidInput("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let stderr_slope = if n > 2 { (sse / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept,
        stderr_slope,
        r_squared,
        points: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr_slope: f64,
    /// NaN for the critical model, which has no fixed slope.
    pub theory_slope: f64,
    pub rel_err: f64,
    pub r_squared: f64,
    pub points_used: usize,
    pub pass: bool,
}

/// log T against log(1/eps); passes when the slope is within `tol` of 2p(p-1)/gamma.
pub fn fit_subcritical(eps: &[f64], t_est: &[f64], idx: ProblemIndex, tol: f64) -> Result<ScalingFit> {
    if eps.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            got: eps.len(),
            need: MIN_FIT_POINTS,
        });
    }
    let x: Vec<f64> = eps.iter().map(|e| -e.ln()).collect();
    let y: Vec<f64> = t_est.iter().map(|t| t.ln()).collect();
    let f = ols(&x, &y)?;
    let theory = subcritical_rate(idx);
    let rel_err = (f.slope - theory).abs() / theory.abs();
    Ok(ScalingFit {
        slope: f.slope,
        intercept: f.intercept,
        stderr_slope: f.stderr_slope,
        theory_slope: theory,
        rel_err,
        r_squared: f.r_squared,
        points_used: f.points,
        pass: rel_err <= tol,
    })
}

/// log T against eps^{-p(p-1)}; passes on linearity (determination >= 0.95).
pub fn fit_critical(eps: &[f64], log_t: &[f64], p: f64) -> Result<ScalingFit> {
    if eps.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            got: eps.len(),
            need: MIN_FIT_POINTS,
        });
    }
    let rate = critical_rate(p);
    let x: Vec<f64> = eps.iter().map(|e| e.powf(-rate)).collect();
    let f = ols(&x, log_t)?;
    Ok(ScalingFit {
        slope: f.slope,
        intercept: f.intercept,
        stderr_slope: f.stderr_slope,
        theory_slope: f64::NAN,
        rel_err: f64::NAN,
        r_squared: f.r_squared,
        points_used: f.points,
        pass: f.r_squared >= MIN_DETERMINATION,
    })
}
