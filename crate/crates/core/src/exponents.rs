//! Exponent algebra for the power nonlinearity |u|^p.

use crate::error::{Error, Result};

/// Default relative tolerance for deciding p = p_S(n).
pub const CRITICAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemIndex {
    pub n: u32,
    pub p: f64,
}

impl ProblemIndex {
    pub fn new(n: u32, p: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("dimension n = {n} must be >= 2")));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidInput(format!("power p = {p} must be > 1")));
        }
        Ok(Self { n, p })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criticality {
    SubCritical,
    Critical,
    SuperCritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LifespanForm {
    PowerLaw,
    Exponential,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalityVerdict {
    pub class: Criticality,
    pub gamma_value: f64,
    /// Exponent of 1/eps in the lifespan bound; NaN when no bound applies.
    pub lifespan_rate: f64,
    pub lifespan_form: LifespanForm,
}

/// gamma(p, n) = 2 + (n+1)p - (n-1)p^2.
pub fn gamma(idx: ProblemIndex) -> f64 {
    gamma_raw(idx.n, idx.p)
}

pub(crate) fn gamma_raw(n: u32, p: f64) -> f64 {
    let n = n as f64;
    2.0 + (n + 1.0) * p - (n - 1.0) * p * p
}

/// Positive root of gamma(., n).
pub fn strauss_exponent(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("dimension n = {n} must be >= 2")));
    }
    let nf = n as f64;
    let disc = nf * nf + 10.0 * nf - 7.0;
    Ok((nf + 1.0 + disc.sqrt()) / (2.0 * (nf - 1.0)))
}

pub fn fujita_exponent(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidInput("dimension n must be >= 1".into()));
    }
    Ok(1.0 + 2.0 / n as f64)
}

/// 2p(p-1)/gamma, the power-law rate.
pub fn subcritical_rate(idx: ProblemIndex) -> f64 {
    2.0 * idx.p * (idx.p - 1.0) / gamma(idx)
}

/// p(p-1), the exponent inside the exponential lifespan.
pub fn critical_rate(p: f64) -> f64 {
    p * (p - 1.0)
}

/// Tolerance is relative to p_S(n).
pub fn classify(idx: ProblemIndex, tol: f64) -> Result<CriticalityVerdict> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be > 0")));
    }
    let ps = strauss_exponent(idx.n)?;
    let g = gamma(idx);
    let band = tol * ps;
    let verdict = if (idx.p - ps).abs() <= band {
        CriticalityVerdict {
            class: Criticality::Critical,
            gamma_value: g,
            lifespan_rate: critical_rate(idx.p),
            lifespan_form: LifespanForm::Exponential,
        }
    } else if idx.p < ps {
        if g <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "gamma = {g} is not positive for sub-critical p = {}",
                idx.p
            )));
        }
        CriticalityVerdict {
            class: Criticality::SubCritical,
            gamma_value: g,
            lifespan_rate: subcritical_rate(idx),
            lifespan_form: LifespanForm::PowerLaw,
        }
    } else {
        CriticalityVerdict {
            class: Criticality::SuperCritical,
            gamma_value: g,
            lifespan_rate: f64::NAN,
            lifespan_form: LifespanForm::None,
        }
    };
    Ok(verdict)
}
