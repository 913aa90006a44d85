//! Exact numerics on truncated state spaces.

mod grid;
mod permanent;
mod pmf;
mod quasi;
mod solver;

pub use grid::TruncatedGrid;
pub use permanent::{
    ln_empty_probability, ln_permanent_ps, permanent_ps_distribution, required_n_max,
    PermanentPsDistribution,
};
pub use pmf::{
    total_variation, BoundaryMass, ConditionalDistribution, ConditionalSource, JointPmf, Moments,
    NORMALIZATION_TOL,
};
pub use quasi::{quasi_stationary, quasi_stationary_m_max};
pub use solver::{
    balance_residual, solve_auto, solve_stationary, solve_stationary_with, uniformization_rate,
    SolveSummary, SolverOptions, StationaryDistribution, DEFAULT_TOL,
};
