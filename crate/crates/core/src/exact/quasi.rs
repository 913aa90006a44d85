//! Quasi-stationary approximation of `M` given `N = n`.
//!
//! `N` is frozen at `n`; `M` is then a birth-death chain with birth rate
//! `beta` and death rate `m (nu / (n + m) + theta)` in state `m`.

use super::pmf::{ConditionalDistribution, ConditionalSource};
use crate::model::ModelParams;

pub fn quasi_stationary(params: &ModelParams, n: usize, m_max: usize) -> ConditionalDistribution {
    let ln_beta = params.beta().ln();
    let mut log_w = Vec::with_capacity(m_max + 1);
    log_w.push(0.0);
    for k in 1..=m_max {
        let death = params.out_rates(n as u64, k as u64).impatient_departure;
        let prev = log_w[k - 1];
        log_w.push(prev + ln_beta - death.ln());
    }
    let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_w.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    ConditionalDistribution {
        n,
        pmf: weights.into_iter().map(|w| w / total).collect(),
        source: ConditionalSource::QuasiStationary,
    }
}

/// `m_max` such that the quasi-stationary tail is far below `1e-12`.
///
/// The death rate is at least `theta m`, so the tail is dominated by that
/// of Poisson(A).
pub fn quasi_stationary_m_max(params: &ModelParams) -> usize {
    let a = params.derived().a;
    (a + 12.0 * a.sqrt() + 30.0).ceil() as usize
}
