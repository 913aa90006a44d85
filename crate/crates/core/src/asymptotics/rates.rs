//! Large-deviation decay rates.

use crate::error::{Error, Result};

/// `x log x` with the continuous extension `0` at `x = 0`.
#[inline]
pub(crate) fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

pub(crate) fn check_load(rho: f64) -> Result<()> {
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

fn check_coordinate(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and >= 0",
        })
    }
}

/// Decay rate of the `N` marginal:
/// `x log(x/rho) - (x+1) log(x+1) - log(1-rho)`.
pub fn phi(x: f64, rho: f64) -> Result<f64> {
    check_load(rho)?;
    check_coordinate("x", x)?;
    Ok(xlogx(x) - x * rho.ln() - xlogx(x + 1.0) - (-rho).ln_1p())
}

/// `Phi'(x) = log(x / (rho (x + 1)))`; `-inf` at `x = 0`.
pub fn phi_prime(x: f64, rho: f64) -> Result<f64> {
    check_load(rho)?;
    check_coordinate("x", x)?;
    Ok((x / (rho * (x + 1.0))).ln())
}

/// Decay rate of the `M` marginal: `y log y - y + 1`.
pub fn psi(y: f64) -> Result<f64> {
    check_coordinate("y", y)?;
    Ok(xlogx(y) - y + 1.0)
}

/// `H(x, y) = Phi(x) + Psi(y)`.
pub fn decay_h(x: f64, y: f64, rho: f64) -> Result<f64> {
    Ok(phi(x, rho)? + psi(y)?)
}

/// Decay rate of the permanent-customer queue:
/// `K(x, y) = x log(x/rho) + y log y - (x+y) log(x+y) - y log(1-rho)`.
pub fn decay_k(x: f64, y: f64, rho: f64) -> Result<f64> {
    check_load(rho)?;
    check_coordinate("x", x)?;
    check_coordinate("y", y)?;
    Ok(xlogx(x) - x * rho.ln() + xlogx(y) - xlogx(x + y) - y * (-rho).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        assert!((phi(0.0, 0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(phi(1.0, 0.5).unwrap().abs() < 1e-15);
        for rho in [0.1, 0.5, 0.9] {
            assert!(phi(rho / (1.0 - rho), rho).unwrap().abs() < 1e-14);
        }
        assert!((phi(3.0, 0.5).unwrap() - 0.523).abs() < 1e-3);
        assert!(phi(1.0, 1.0).is_err());
        assert!(phi(-1.0, 0.5).is_err());
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(1.0).unwrap(), 0.0);
        assert_eq!(psi(0.0).unwrap(), 1.0);
        assert!((psi(3.0).unwrap() - (3.0 * 3f64.ln() - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn decay_anchor_values() {
        let h = |x, y| decay_h(x, y, 0.5).unwrap();
        assert!((h(0.0, 0.0) - (1.0 + 2f64.ln())).abs() < 1e-15);
        assert!((h(3.0, 0.0) - 1.52).abs() < 0.01);
        assert!((h(0.0, 3.0) - 1.99).abs() < 0.01);
        assert!(h(1.0, 1.0).abs() < 1e-15);
    }

    #[test]
    fn exp_phi_prime_identity() {
        let rho = 0.35;
        for x in [0.05, 0.3, 1.0, 4.0, 20.0] {
            let d = 1e-6 * x;
            let fd = (phi(x + d, rho).unwrap() - phi(x - d, rho).unwrap()) / (2.0 * d);
            let closed = x / (rho * (x + 1.0));
            assert!((fd.exp() / closed - 1.0).abs() < 1e-6, "x={x}");
            assert!((phi_prime(x, rho).unwrap().exp() / closed - 1.0).abs() < 1e-14);
        }
        assert!(phi_prime(rho / (1.0 - rho), rho).unwrap().abs() < 1e-15);
    }

    #[test]
    fn k_reduces_to_phi_and_vanishes_on_its_zero_locus() {
        let rho = 0.6;
        for i in 0..=100 {
            let x = i as f64 * 0.1;
            assert!((decay_k(x, 1.0, rho).unwrap() - phi(x, rho).unwrap()).abs() < 1e-12);
        }
        for i in 1..=100 {
            let y = i as f64 * 0.1;
            assert!(decay_k(rho * y / (1.0 - rho), y, rho).unwrap().abs() < 1e-12);
        }
    }
}
