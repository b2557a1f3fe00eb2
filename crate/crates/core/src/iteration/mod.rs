//! Iteration and slicing sequences, lifespan thresholds and Volterra envelopes.

pub mod crit;
pub mod envelope;
pub mod subcrit;

pub use crit::{crit_sequences, crit_threshold, slicing_b, slicing_e, slicing_n, CritSequences, CritThreshold};
pub use envelope::{
    crit_seed, log_grid, subcrit_seed, volterra_envelope_crit, volterra_envelope_subcrit, EnvelopeResult,
    DIVERGENCE_CAP, STORE_CAP,
};
pub use subcrit::{alpha, beta, j_function, s_p_inf, subcrit_sequences, subcrit_threshold, SubcritSequences, SubcritThreshold};
