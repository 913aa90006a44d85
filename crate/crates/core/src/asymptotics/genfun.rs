//! Heavy-traffic asymptotics of `F_A(u, v) = E(u^N v^M)`.

use num_complex::Complex64;

use super::rates::check_load;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Polar form `u = r e^{i zeta}`, `v = s e^{i eta}` after the domain check.
struct Polar {
    r: f64,
    zeta: f64,
    s: f64,
    eta: f64,
}

fn polar_in_domain(u: Complex64, v: Complex64, rho: f64) -> Result<Polar> {
    let (r, zeta) = u.to_polar();
    let (s, eta) = v.to_polar();
    if !(r < 1.0 / rho) {
        return Err(Error::OutOfDomain(format!(
            "|u| = {r} must be below 1/rho = {}",
            1.0 / rho
        )));
    }
    if u.im == 0.0 && u.re <= 0.0 {
        return Err(Error::OutOfDomain(format!(
            "u = {u} lies on the cut (-1/rho, 0]"
        )));
    }
    if v.im == 0.0 && v.re <= 0.0 {
        return Err(Error::OutOfDomain(format!(
            "v = {v} lies on the cut (-inf, 0]"
        )));
    }
    Ok(Polar { r, zeta, s, eta })
}

/// `log G0(u, v)` with
/// `G0 = ((1-rho)/(1-rho r)) [s + rho r (1-s)]^((alpha/theta)(1-r) - c)`.
pub fn ln_g0(u: Complex64, v: Complex64, params: &ModelParams) -> Result<f64> {
    let d = params.derived();
    check_load(d.rho)?;
    let Polar { r, s, .. } = polar_in_domain(u, v, d.rho)?;
    ln_g0_polar(r, s, params)
}

fn ln_g0_polar(r: f64, s: f64, params: &ModelParams) -> Result<f64> {
    let d = params.derived();
    let base = s + d.rho * r * (1.0 - s);
    if !(base > 0.0) {
        return Err(Error::OutOfDomain(format!(
            "G0 base s + rho r (1 - s) = {base} is not positive"
        )));
    }
    let exponent = params.alpha() / params.theta() * (1.0 - r) - d.c;
    Ok(((1.0 - d.rho) / (1.0 - d.rho * r)).ln() + exponent * base.ln())
}

/// Full right-hand side of the heavy-traffic expansion of `F_A(u, v)`:
/// `((1-rho)/(1-rho r))^A e^{A(s-1)}
///  exp[iA(rho r zeta/(1-rho r) + s eta)]
///  exp[-A/2 (rho r zeta^2/(1-rho r)^2 + s eta^2)] G0(u, v)`.
pub fn gen_fun_asymptotic(
    u: Complex64,
    v: Complex64,
    a: f64,
    params: &ModelParams,
) -> Result<Complex64> {
    let d = params.derived();
    check_load(d.rho)?;
    let Polar { r, zeta, s, eta } = polar_in_domain(u, v, d.rho)?;
    let q = 1.0 - d.rho * r;
    let real = a * ((1.0 - d.rho) / q).ln() + a * (s - 1.0)
        - 0.5 * a * (d.rho * r * zeta * zeta / (q * q) + s * eta * eta)
        + ln_g0_polar(r, s, params)?;
    let phase = a * (d.rho * r * zeta / q + s * eta);
    Ok(Complex64::from_polar(real.exp(), phase))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::new(0.5, 100.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn unity_at_one_one() {
        let one = Complex64::new(1.0, 0.0);
        for a in [1.0, 37.5, 1e4] {
            assert_eq!(gen_fun_asymptotic(one, one, a, &params()).unwrap(), one);
        }
        assert_eq!(ln_g0(one, one, &params()).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_characteristic_function() {
        let p = params();
        let (sigma, tau): (f64, f64) = (0.8, -1.3);
        let target = (-0.5 * (0.5 * sigma * sigma / 0.25 + tau * tau)).exp();
        for a in [1e2, 1e4, 1e6] {
            let u = Complex64::from_polar(1.0, sigma / f64::sqrt(a));
            let v = Complex64::from_polar(1.0, tau / f64::sqrt(a));
            let err = (gen_fun_asymptotic(u, v, a, &p).unwrap().norm() - target).abs();
            assert!(err < 1e-12, "A={a}");
        }
    }

    #[test]
    fn domain_checks() {
        let p = params();
        let c = |re, im| Complex64::new(re, im);
        assert!(gen_fun_asymptotic(c(2.5, 0.0), c(1.0, 0.0), 10.0, &p).is_err());
        assert!(gen_fun_asymptotic(c(-0.5, 0.0), c(1.0, 0.0), 10.0, &p).is_err());
        assert!(gen_fun_asymptotic(c(1.0, 0.0), c(-0.5, 0.0), 10.0, &p).is_err());
        assert!(gen_fun_asymptotic(c(1.0, 0.0), c(0.0, 0.0), 10.0, &p).is_err());
        assert!(gen_fun_asymptotic(c(-0.5, 0.1), c(0.5, -0.5), 10.0, &p).is_ok());
    }
}
