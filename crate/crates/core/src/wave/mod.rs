pub mod blowup;
pub mod checks;
pub mod data;
pub mod functionals;
pub mod grid;
pub mod scheme;
pub mod solver;

pub use blowup::{combine_levels, crossing_time, detect_blowup, richardson, BlowUpEstimate, REFINE_TOL};
pub use data::InitialBump;
pub use functionals::{functional_g, functional_weighted, residual_g_identity, FrameWeight, PhiWeight, Weight};
pub use grid::RadialGrid;
pub use scheme::{LevelStats, SchemeParams, Simulation, SourceFn, SUPPORT_FLOOR};
pub use solver::{
    check_theorem_hypotheses, run, Mode, RefinementLevel, SolveReport, SolverConfig, Source, Trace,
    WeightedConfig,
};
