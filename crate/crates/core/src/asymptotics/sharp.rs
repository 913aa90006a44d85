//! Sharp (prefactor-corrected) local asymptotics.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::rates::{check_load, decay_h, decay_k, phi, psi};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// `H`, `g` and the sharp estimate of `P(N = Ax, M = Ay)` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPoint {
    pub x: f64,
    pub y: f64,
    pub a: f64,
    pub h_value: f64,
    pub g_value: f64,
    pub density_estimate: f64,
    /// `log density_estimate`, finite even when the estimate underflows.
    pub ln_density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Marginal {
    N,
    M,
}

/// Centred second moments of the heavy-traffic Gaussian limit of
/// `((N - A x*) / sqrt(A), (M - A) / sqrt(A))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianLimit {
    pub var_xi: f64,
    pub var_eta: f64,
    pub cov: f64,
    pub center: (f64, f64),
}

fn check_interior(x: f64, y: f64) -> Result<()> {
    if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!(
            "({x}, {y}) is not in the open positive quadrant"
        )))
    }
}

fn check_scale(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "A",
            value: a,
            reason: "must be finite and > 0",
        })
    }
}

/// `log g(x, y)`.
pub fn ln_prefactor_g(x: f64, y: f64, params: &ModelParams) -> Result<f64> {
    check_interior(x, y)?;
    let d = params.derived();
    check_load(d.rho)?;
    let ln_ratio = (x + 1.0).ln() - (x + y).ln();
    let drift = params.mu() / params.theta() * (1.0 - d.rho) * (x - d.x_star) / (x + 1.0);
    Ok((-d.rho).ln_1p()
        + 0.5 * ((x + 1.0).ln() - x.ln() - y.ln())
        + d.c * ln_ratio
        + drift * ln_ratio)
}

/// `g(x,y) = (1-rho) sqrt((x+1)/(xy)) ((x+1)/(x+y))^c
///   exp[(mu/theta)(1-rho) (x-x*)/(x+1) log((x+1)/(x+y))]`.
pub fn prefactor_g(x: f64, y: f64, params: &ModelParams) -> Result<f64> {
    ln_prefactor_g(x, y, params).map(f64::exp)
}

pub fn asymptotic_point(x: f64, y: f64, a: f64, params: &ModelParams) -> Result<AsymptoticPoint> {
    check_scale(a)?;
    let ln_g = ln_prefactor_g(x, y, params)?;
    let h_value = decay_h(x, y, params.derived().rho)?;
    let ln_density = ln_g - (2.0 * PI * a).ln() - a * h_value;
    Ok(AsymptoticPoint {
        x,
        y,
        a,
        h_value,
        g_value: ln_g.exp(),
        density_estimate: ln_density.exp(),
        ln_density,
    })
}

/// `g(x,y) / (2 pi A) exp(-A H(x,y))`.
pub fn sharp_density(x: f64, y: f64, a: f64, params: &ModelParams) -> Result<f64> {
    asymptotic_point(x, y, a, params).map(|p| p.density_estimate)
}

/// `log` of [`marginal_asymptotics`].
pub fn ln_marginal_asymptotics(
    kind: Marginal,
    coordinate: f64,
    a: f64,
    params: &ModelParams,
) -> Result<f64> {
    check_scale(a)?;
    if !(coordinate > 0.0 && coordinate.is_finite()) {
        return Err(Error::OutOfDomain(format!(
            "marginal coordinate {coordinate} must be > 0"
        )));
    }
    let d = params.derived();
    check_load(d.rho)?;
    let ln_2pi_a = (2.0 * PI * a).ln();
    Ok(match kind {
        Marginal::N => {
            let x = coordinate;
            (-d.rho).ln_1p() - 0.5 * ln_2pi_a + 0.5 * ((x + 1.0).ln() - x.ln()) - a * phi(x, d.rho)?
        }
        Marginal::M => {
            let y = coordinate;
            -a * psi(y)?
                - 0.5 * (ln_2pi_a + y.ln())
                - d.c * ((-d.rho).ln_1p() + (d.x_star + y).ln())
        }
    })
}

/// Local estimates of `P(N = Ax)` and `P(M = Ay)`.
pub fn marginal_asymptotics(
    kind: Marginal,
    coordinate: f64,
    a: f64,
    params: &ModelParams,
) -> Result<f64> {
    ln_marginal_asymptotics(kind, coordinate, a, params).map(f64::exp)
}

/// Sharp estimate of `E_{Ay}(Ax)`:
/// `(1-rho)/sqrt(2 pi A) sqrt((x+y)/(xy)) exp(-A K(x,y))`.
pub fn sharp_permanent(x: f64, y: f64, a: f64, rho: f64) -> Result<f64> {
    check_scale(a)?;
    check_interior(x, y)?;
    let k = decay_k(x, y, rho)?;
    let ln =
        (-rho).ln_1p() - 0.5 * (2.0 * PI * a).ln() + 0.5 * ((x + y).ln() - x.ln() - y.ln()) - a * k;
    Ok(ln.exp())
}

pub fn gaussian_limit(params: &ModelParams) -> Result<GaussianLimit> {
    params.require_stable()?;
    let d = params.derived();
    Ok(GaussianLimit {
        var_xi: d.rho / (1.0 - d.rho).powi(2),
        var_eta: 1.0,
        cov: 0.0,
        center: (d.x_star, d.y_star),
    })
}
