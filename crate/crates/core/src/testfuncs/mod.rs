//! Spectral test functions phi_lambda, xi_q, eta_q and numerical audits of their bounds.

pub mod audit;
pub mod kernel;
pub mod phi;

pub use audit::{lemma41_audit, lemma41_refinement, AuditGrids, AuditPart, BoundAudit};
pub use kernel::{KernelConfig, SpectralKernel};
pub use phi::{phi_bound_fit, sphere_area, PhiEvaluator};
