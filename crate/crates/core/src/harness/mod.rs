//! Sweeps, scaling fits, configuration files and CSV output behind the CLI.

pub mod commands;
pub mod config;
pub mod fit;
pub mod output;
pub mod sweep;

pub use commands::Outcome;
pub use config::ConfigMap;
pub use fit::{fit_critical, fit_subcritical, ols, LinearFit, ScalingFit};
pub use sweep::{
    fit_envelope_rows, run_envelope_sweep, run_sweep, EnvelopeRow, EnvelopeSweepConfig, SweepConfig, SweepRow,
    SweepTable,
};
