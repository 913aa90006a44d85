//! Numerics for a two-class processor-sharing queue in which one class is
//! impatient: exact stationary laws on truncated lattices, exact-jump
//! simulation, heavy-traffic asymptotics and the closed-loop cell model.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod config;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod mobile;
pub mod model;
pub mod sim;

pub use config::Config;
pub use error::{Error, Result};
pub use exact::{JointPmf, StationaryDistribution, TruncatedGrid};
pub use mobile::{MobileInputs, MobileScenario};
pub use model::{DerivedConstants, ModelParams, OutRates, State};
pub use sim::{EmpiricalDistribution, SimConfig};
