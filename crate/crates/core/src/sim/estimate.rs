use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::path::{simulate_path, OccupancyAccumulator};
use super::SimConfig;
use crate::error::Result;
use crate::exact::{JointPmf, TruncatedGrid};
use crate::model::{ModelParams, State};

/// Time-weighted occupancy pooled over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    pub pmf: JointPmf,
    /// Post-burn-in time summed over replications.
    pub total_time: f64,
    pub replication_means: Vec<ReplicationMean>,
    pub events: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationMean {
    pub replication: usize,
    pub mean_n: f64,
    pub mean_m: f64,
    pub events: u64,
}

impl EmpiricalDistribution {
    /// Standard error of the pooled means from the spread across
    /// replications; `None` with a single replication.
    pub fn standard_errors(&self) -> Option<(f64, f64)> {
        let k = self.replication_means.len();
        if k < 2 {
            return None;
        }
        let kf = k as f64;
        let mn = self.replication_means.iter().map(|r| r.mean_n).sum::<f64>() / kf;
        let mm = self.replication_means.iter().map(|r| r.mean_m).sum::<f64>() / kf;
        let vn = self
            .replication_means
            .iter()
            .map(|r| (r.mean_n - mn).powi(2))
            .sum::<f64>()
            / (kf - 1.0);
        let vm = self
            .replication_means
            .iter()
            .map(|r| (r.mean_m - mm).powi(2))
            .sum::<f64>()
            / (kf - 1.0);
        Some(((vn / kf).sqrt(), (vm / kf).sqrt()))
    }
}

/// Starting point of every replication: the fluid fixed point `(A x*, A)`.
pub fn fluid_start(params: &ModelParams) -> State {
    let d = params.derived();
    State::new((d.a * d.x_star).round() as u64, d.a.round() as u64)
}

pub fn estimate_stationary(
    params: &ModelParams,
    config: &SimConfig,
) -> Result<EmpiricalDistribution> {
    params.require_stable()?;
    let start = fluid_start(params);
    let runs: Vec<(OccupancyAccumulator, u64)> = (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let mut acc = OccupancyAccumulator::new(config.burn_in);
            let summary = simulate_path(params, config, start, rep as u64, &mut acc);
            (acc, summary.events)
        })
        .collect();

    let mut pooled = OccupancyAccumulator::new(config.burn_in);
    let mut replication_means = Vec::with_capacity(runs.len());
    let mut events = 0;
    for (rep, (acc, ev)) in runs.iter().enumerate() {
        pooled.merge(acc);
        events += ev;
        replication_means.push(ReplicationMean {
            replication: rep,
            mean_n: acc.mean_n(),
            mean_m: acc.mean_m(),
            events: *ev,
        });
    }

    let (n_max, m_max) = pooled.extent();
    let grid = TruncatedGrid::new(n_max.max(1), m_max.max(1))?;
    let mut weights = vec![0.0; grid.len()];
    for n in 0..=grid.n_max {
        for m in 0..=grid.m_max {
            weights[grid.index(n, m)] = pooled.time_in(n, m);
        }
    }
    Ok(EmpiricalDistribution {
        pmf: JointPmf::from_weights(grid, weights)?,
        total_time: pooled.total_time(),
        replication_means,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pooling_identical_replications() {
        let p = ModelParams::new(0.3, 3.0, 1.0, 1.0, 1.0).unwrap();
        let one = SimConfig::new(5, 500.0, 10.0, 1).unwrap();
        let single = estimate_stationary(&p, &one).unwrap();
        // replication 0 of a larger run is the same path
        let mut acc = OccupancyAccumulator::new(10.0);
        simulate_path(&p, &one, fluid_start(&p), 0, &mut acc);
        assert_eq!(single.total_time, acc.total_time());
        assert!((single.pmf.moments().mean_m - acc.mean_m()).abs() < 1e-12);
        assert!(single.standard_errors().is_none());
    }

    #[test]
    fn pmf_is_normalised() {
        let p = ModelParams::new(0.5, 4.0, 1.0, 1.0, 1.0).unwrap();
        let c = SimConfig::new(11, 300.0, 20.0, 3).unwrap();
        let e = estimate_stationary(&p, &c).unwrap();
        assert!((e.pmf.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((e.total_time - 3.0 * 280.0).abs() < 1e-9);
        assert_eq!(e.replication_means.len(), 3);
    }

    #[test]
    fn unstable_rejected() {
        let p = ModelParams::new(1.5, 4.0, 1.0, 1.0, 1.0).unwrap();
        assert!(estimate_stationary(&p, &SimConfig::new(1, 10.0, 0.0, 1).unwrap()).is_err());
    }
}
