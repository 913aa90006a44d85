//! Joint simulation of `(N, M)` with an infinite-server copy `M'` of the
//! impatient class.
//!
//! Both systems see the same impatient arrivals. Each customer present in
//! both systems carries one abandonment clock, so `theta M` abandonments
//! remove a customer from both; the `M' - M` extra customers of `M'`
//! abandon on their own at `theta` each. Service completions of impatient
//! customers only affect `M`. Started from `M' = M`, this keeps
//! `M <= M'` on every path.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SimConfig;
use crate::error::{Error, Result};
use crate::model::{ModelParams, State};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub events: u64,
    pub violations: u64,
    /// Whether `M = M'` held at every epoch.
    pub identical: bool,
    pub max_gap: u64,
    /// Post-burn-in time, pooled over replications.
    pub total_time: f64,
    /// Time-weighted `P(M >= m)` for `m = 0..`.
    pub tail_m: Vec<f64>,
    /// Time-weighted `P(M' >= m)` for `m = 0..`.
    pub tail_m_prime: Vec<f64>,
}

struct RunStats {
    events: u64,
    identical: bool,
    max_gap: u64,
    time: f64,
    occupancy_m: Vec<f64>,
    occupancy_m_prime: Vec<f64>,
}

fn add(v: &mut Vec<f64>, k: u64, dt: f64) {
    let k = k as usize;
    if v.len() <= k {
        v.resize(k + 1, 0.0);
    }
    v[k] += dt;
}

fn run_one(params: &ModelParams, config: &SimConfig, initial: State, rep: u64) -> Result<RunStats> {
    let mut rng = config.rng(rep);
    let cap = config.max_events.unwrap_or(u64::MAX);
    let theta = params.theta();
    let (mut n, mut m) = (initial.n, initial.m);
    let mut mp = m;
    let mut t = 0.0;
    let mut stats = RunStats {
        events: 0,
        identical: true,
        max_gap: 0,
        time: 0.0,
        occupancy_m: Vec::new(),
        occupancy_m_prime: Vec::new(),
    };
    let record = |stats: &mut RunStats, m: u64, mp: u64, start: f64, end: f64| {
        let dt = end - start.max(config.burn_in);
        if dt > 0.0 {
            add(&mut stats.occupancy_m, m, dt);
            add(&mut stats.occupancy_m_prime, mp, dt);
            stats.time += dt;
        }
    };

    while stats.events < cap {
        let r = params.out_rates(n, m);
        let share = if n + m == 0 {
            0.0
        } else {
            m as f64 / (n + m) as f64
        };
        let service_m = params.nu() * share;
        let shared_abandon = theta * m as f64;
        let extra_abandon = theta * (mp - m) as f64;
        let rates = [
            r.patient_arrival,
            r.impatient_arrival,
            r.patient_departure,
            service_m,
            shared_abandon,
            extra_abandon,
        ];
        let total: f64 = rates.iter().sum();
        let end = if total > 0.0 {
            let hold: f64 = Exp1.sample(&mut rng);
            t + hold / total
        } else {
            f64::INFINITY
        };
        if end >= config.t_end {
            record(&mut stats, m, mp, t, config.t_end);
            break;
        }
        record(&mut stats, m, mp, t, end);
        t = end;

        let mut pick = rng.random::<f64>() * total;
        let mut kind = rates.len() - 1;
        for (i, &rate) in rates.iter().enumerate() {
            if pick < rate {
                kind = i;
                break;
            }
            pick -= rate;
        }
        while rates[kind] == 0.0 {
            kind -= 1;
        }
        match kind {
            0 => n += 1,
            1 => {
                m += 1;
                mp += 1;
            }
            2 => n -= 1,
            3 => m -= 1,
            4 => {
                m -= 1;
                mp -= 1;
            }
            _ => mp -= 1,
        }
        stats.events += 1;
        if m > mp {
            return Err(Error::DominanceViolation {
                time: t,
                m,
                m_prime: mp,
            });
        }
        stats.identical &= m == mp;
        stats.max_gap = stats.max_gap.max(mp - m);
    }
    Ok(stats)
}

fn tail(occupancy: &[f64], total: f64, len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    let mut acc = 0.0;
    for k in (0..len).rev() {
        acc += occupancy.get(k).copied().unwrap_or(0.0);
        out[k] = acc / total;
    }
    out
}

/// Runs `config.replications` coupled paths from `initial` (with
/// `M'(0) = M(0)`), checking `M <= M'` after every jump.
pub fn coupled_dominance_run(
    params: &ModelParams,
    config: &SimConfig,
    initial: State,
) -> Result<DominanceReport> {
    let runs: Vec<Result<RunStats>> = (0..config.replications)
        .into_par_iter()
        .map(|rep| run_one(params, config, initial, rep as u64))
        .collect();
    let mut events = 0;
    let mut identical = true;
    let mut max_gap = 0;
    let mut time = 0.0;
    let mut occ_m: Vec<f64> = Vec::new();
    let mut occ_mp: Vec<f64> = Vec::new();
    for run in runs {
        let s = run?;
        events += s.events;
        identical &= s.identical;
        max_gap = max_gap.max(s.max_gap);
        time += s.time;
        for (k, &dt) in s.occupancy_m.iter().enumerate() {
            add(&mut occ_m, k as u64, dt);
        }
        for (k, &dt) in s.occupancy_m_prime.iter().enumerate() {
            add(&mut occ_mp, k as u64, dt);
        }
    }
    let len = occ_m.len().max(occ_mp.len());
    Ok(DominanceReport {
        events,
        violations: 0,
        identical,
        max_gap,
        total_time: time,
        tail_m: tail(&occ_m, time, len),
        tail_m_prime: tail(&occ_mp, time, len),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_impatient_service_keeps_copies_equal() {
        let p = ModelParams::new(0.5, 10.0, 1.0, 0.0, 1.0).unwrap();
        let c = SimConfig::new(1, 1e3, 0.0, 1).unwrap();
        let r = coupled_dominance_run(&p, &c, State::new(5, 10)).unwrap();
        assert!(r.identical);
        assert_eq!(r.max_gap, 0);
        assert!(r.events > 1000);
        assert_eq!(r.tail_m, r.tail_m_prime);
    }

    #[test]
    fn service_opens_a_gap() {
        let p = ModelParams::new(0.5, 10.0, 1.0, 5.0, 1.0).unwrap();
        let c = SimConfig::new(2, 1e3, 10.0, 2).unwrap();
        let r = coupled_dominance_run(&p, &c, State::new(5, 10)).unwrap();
        assert!(!r.identical && r.max_gap > 0);
        assert_eq!(r.violations, 0);
        assert!((r.tail_m[0] - 1.0).abs() < 1e-12);
        for (a, b) in r.tail_m.iter().zip(&r.tail_m_prime) {
            assert!(a <= &(b + 1e-12));
        }
    }
}
