use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("unstable model: load rho = {rho} must be < 1")]
    Unstable { rho: f64 },

    #[error("solver did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("marginal mass at n = {n} is zero; conditional distribution undefined")]
    ZeroMass { n: usize },

    #[error("argument outside the validity domain: {0}")]
    OutOfDomain(String),

    #[error("no interior minimum found on [{lo}, {hi}]")]
    NoInteriorMinimum { lo: f64, hi: f64 },

    #[error("curvature at the minimiser is not positive ({0:e})")]
    NonPositiveCurvature(f64),

    #[error("dominance violated at t = {time}: M = {m} > M' = {m_prime}")]
    DominanceViolation { time: f64, m: u64, m_prime: u64 },

    #[error(
        "fixed point not reached after {iterations} iterations (residual history tail {history:?})"
    )]
    FixedPointNotReached {
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
