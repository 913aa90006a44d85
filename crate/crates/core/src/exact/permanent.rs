//! Single-server processor-sharing queue with `m` permanent customers.
//!
//! Patients arrive at rate `alpha` and are served at rate `mu` in total,
//! shared with `m` customers that never leave. With `rho = alpha / mu` the
//! occupancy law is
//! `E_m(n) = rho^n prod_{k=1..n} (1 + m/k) (1 - rho)^(m+1)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PermanentPsDistribution {
    pub m: u64,
    pub rho: f64,
    /// `E_m(n)` for `n = 0..=n_max`, not renormalised.
    pub pmf: Vec<f64>,
    /// `ln E_m(n)`, accumulated in log space.
    pub ln_pmf: Vec<f64>,
    /// Mass beyond `n_max`.
    pub tail_mass: f64,
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "must lie in (0, 1)",
        })
    }
}

/// `ln E_m(0) = (m + 1) ln(1 - rho)`.
pub fn ln_empty_probability(m: u64, rho: f64) -> f64 {
    (m as f64 + 1.0) * (-rho).ln_1p()
}

/// `ln E_m(n)` for a single `n`, summing the product directly.
pub fn ln_permanent_ps(m: u64, rho: f64, n: u64) -> f64 {
    let mf = m as f64;
    (1..=n).fold(ln_empty_probability(m, rho), |acc, k| {
        acc + rho.ln() + (mf / k as f64).ln_1p()
    })
}

pub fn permanent_ps_distribution(
    m: u64,
    rho: f64,
    n_max: usize,
) -> Result<PermanentPsDistribution> {
    check_rho(rho)?;
    let mf = m as f64;
    let ln_rho = rho.ln();
    let mut ln_pmf = Vec::with_capacity(n_max + 1);
    let mut acc = ln_empty_probability(m, rho);
    ln_pmf.push(acc);
    for k in 1..=n_max {
        acc += ln_rho + (mf / k as f64).ln_1p();
        ln_pmf.push(acc);
    }
    let pmf: Vec<f64> = ln_pmf.iter().map(|l| l.exp()).collect();
    let tail_mass = (1.0 - pmf.iter().sum::<f64>()).max(0.0);
    Ok(PermanentPsDistribution {
        m,
        rho,
        pmf,
        ln_pmf,
        tail_mass,
    })
}

/// Smallest `n_max` whose geometric tail bound is below `tail_tol`.
///
/// Past the mode the ratio `E(n+1)/E(n) = rho (1 + m/(n+1))` is below one
/// and decreasing, so the tail after `n` is at most `E(n) r / (1 - r)`.
pub fn required_n_max(m: u64, rho: f64, tail_tol: f64) -> Result<usize> {
    check_rho(rho)?;
    let mf = m as f64;
    let mut ln_e = ln_empty_probability(m, rho);
    let mut n = 0usize;
    loop {
        let r = rho * (1.0 + mf / (n as f64 + 1.0));
        if r < 1.0 && ln_e.exp() * r / (1.0 - r) < tail_tol {
            return Ok(n.max(1));
        }
        n += 1;
        ln_e += rho.ln() + (mf / n as f64).ln_1p();
    }
}
