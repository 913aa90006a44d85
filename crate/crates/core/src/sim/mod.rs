//! Exact-jump simulation of the `(N, M)` process.

mod coupling;
mod estimate;
mod path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use coupling::{coupled_dominance_run, DominanceReport};
pub use estimate::{estimate_stationary, fluid_start, EmpiricalDistribution, ReplicationMean};
pub use path::{simulate_path, OccupancyAccumulator, PathObserver, PathSummary, TraceRecorder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub seed: u64,
    pub t_end: f64,
    pub burn_in: f64,
    pub replications: usize,
    /// Optional cap on jumps per replication; the path stops early when hit.
    pub max_events: Option<u64>,
}

impl SimConfig {
    pub fn new(seed: u64, t_end: f64, burn_in: f64, replications: usize) -> Result<Self> {
        if !(t_end.is_finite() && burn_in >= 0.0 && burn_in < t_end) {
            return Err(Error::InvalidParameter {
                name: "burn_in",
                value: burn_in,
                reason: "need 0 <= burn_in < t_end",
            });
        }
        if replications < 1 {
            return Err(Error::InvalidParameter {
                name: "replications",
                value: replications as f64,
                reason: "must be >= 1",
            });
        }
        Ok(SimConfig {
            seed,
            t_end,
            burn_in,
            replications,
            max_events: None,
        })
    }

    pub fn with_max_events(mut self, max_events: u64) -> Self {
        self.max_events = Some(max_events);
        self
    }

    /// Generator for one replication: the master seed selects the key and
    /// the replication index selects the ChaCha stream, so replication `r`
    /// does not depend on how many others run or in which order.
    pub fn rng(&self, replication: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replication);
        rng
    }
}
