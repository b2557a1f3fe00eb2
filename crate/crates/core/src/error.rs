use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("k changes sign near t = {t}")]
    NonOscillationFailure { t: f64 },
    #[error("L1 tail of r2 does not decay (trailing ratio {ratio})")]
    DivergentL1 { ratio: f64 },
    #[error("sandwich bound {which} violated at t = {t} (value {value}, bound {bound})")]
    SandwichViolation {
        which: &'static str,
        t: f64,
        value: f64,
        bound: f64,
    },
    #[error("quadrature did not converge (relative change {rel_change} at z = {z})")]
    QuadratureNonConvergence { z: f64, rel_change: f64 },
    #[error("blow-up detected at t = {t}")]
    BlowUpDetected { t: f64 },
    #[error("support audit failed at t = {t}: radius {radius} exceeds {limit}")]
    SupportViolation { t: f64, radius: f64, limit: f64 },
    #[error("refinement levels disagree: {0}")]
    NonConvergence(String),
    #[error("envelope did not diverge on the grid (max value {max_value})")]
    NoDivergenceOnGrid { max_value: f64 },
    #[error("insufficient data: {got} usable points, {need} needed")]
    InsufficientData { got: usize, need: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error at {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Config(_) | Error::Io { .. } => 1,
            Error::HypothesisViolation(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
