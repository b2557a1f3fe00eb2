//! Multiplier ODEs: the Riccati pair, the decaying profile rho and the fundamental pair chi.

pub mod chi;
pub mod conditions;
pub mod multipliers;
pub mod profile;
pub mod rho;
pub mod rk4;

pub use chi::{solve_chi, ChiData};
pub use conditions::{check_data_conditions, check_relaxed_sign};
pub use multipliers::{
    compute_multipliers, compute_multipliers_from, solve_k, KSolution, MultiplierData, TimeGrid};
pub use profile::CoefficientProfile;
pub use rho::{solve_rho, RhoData};
