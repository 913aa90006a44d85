//! Model parameters and the transition structure of the `(N, M)` process.
//!
//! `N` counts patient customers, `M` impatient ones. Both classes share a
//! single unit-capacity processor-sharing server; impatient customers also
//! leave on their own at rate `theta` each.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five rates of the queue, validated once and immutable afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    alpha: f64,
    beta: f64,
    mu: f64,
    nu: f64,
    theta: f64,
    #[serde(skip)]
    derived: DerivedConstants,
}

/// Constants derived from [`ModelParams`], cached at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Scale `beta / theta`.
    pub a: f64,
    /// Patient load `alpha / mu`.
    pub rho: f64,
    /// Fluid fixed point of `N / A`; infinite when `rho >= 1`.
    pub x_star: f64,
    /// Fluid fixed point of `M / A`.
    pub y_star: f64,
    /// `nu / theta`.
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State {
    pub n: u64,
    pub m: u64,
}

impl State {
    pub const ORIGIN: State = State { n: 0, m: 0 };

    pub fn new(n: u64, m: u64) -> Self {
        State { n, m }
    }
}

/// Outgoing rates of one state, one field per possible jump.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OutRates {
    /// `(n, m) -> (n + 1, m)`
    pub patient_arrival: f64,
    /// `(n, m) -> (n, m + 1)`
    pub impatient_arrival: f64,
    /// `(n, m) -> (n - 1, m)`
    pub patient_departure: f64,
    /// `(n, m) -> (n, m - 1)`, service completion plus abandonment.
    pub impatient_departure: f64,
}

impl OutRates {
    pub fn total(&self) -> f64 {
        self.patient_arrival
            + self.impatient_arrival
            + self.patient_departure
            + self.impatient_departure
    }
}

/// `(target, rate)` pair produced by [`ModelParams::transition_rates`].
pub type Transition = (State, f64);

fn check_rate(name: &'static str, value: f64, strictly_positive: bool) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        });
    }
    if strictly_positive && value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be > 0",
        });
    }
    if value < 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be >= 0",
        });
    }
    Ok(value)
}

impl ModelParams {
    /// `mu` and `theta` must be strictly positive; `alpha`, `beta` and `nu`
    /// may be zero, which covers the degenerate reductions used in tests.
    pub fn new(alpha: f64, beta: f64, mu: f64, nu: f64, theta: f64) -> Result<Self> {
        let alpha = check_rate("alpha", alpha, false)?;
        let beta = check_rate("beta", beta, false)?;
        let mu = check_rate("mu", mu, true)?;
        let nu = check_rate("nu", nu, false)?;
        let theta = check_rate("theta", theta, true)?;
        let rho = alpha / mu;
        let derived = DerivedConstants {
            a: beta / theta,
            rho,
            x_star: if rho < 1.0 {
                rho / (1.0 - rho)
            } else {
                f64::INFINITY
            },
            y_star: 1.0,
            c: nu / theta,
        };
        Ok(ModelParams {
            alpha,
            beta,
            mu,
            nu,
            theta,
            derived,
        })
    }

    /// Same rates with `beta` replaced so that `beta / theta = a`.
    pub fn with_scale(&self, a: f64) -> Result<Self> {
        Self::new(self.alpha, a * self.theta, self.mu, self.nu, self.theta)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.alpha, beta, self.mu, self.nu, self.theta)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn derived(&self) -> &DerivedConstants {
        &self.derived
    }

    pub fn derive_constants(&self) -> DerivedConstants {
        self.derived
    }

    pub fn is_stable(&self) -> bool {
        self.derived.rho < 1.0
    }

    pub fn require_stable(&self) -> Result<()> {
        if self.is_stable() {
            Ok(())
        } else {
            Err(Error::Unstable {
                rho: self.derived.rho,
            })
        }
    }

    /// Outgoing rates at `(n, m)`. The processor-sharing shares use `0/0 = 0`
    /// at the origin.
    #[inline]
    pub fn out_rates(&self, n: u64, m: u64) -> OutRates {
        let occupancy = n + m;
        let (patient_share, impatient_share) = if occupancy == 0 {
            (0.0, 0.0)
        } else {
            let k = occupancy as f64;
            (n as f64 / k, m as f64 / k)
        };
        OutRates {
            patient_arrival: self.alpha,
            impatient_arrival: self.beta,
            patient_departure: self.mu * patient_share,
            impatient_departure: self.nu * impatient_share + self.theta * m as f64,
        }
    }

    /// The non-zero jumps out of `s` with their rates.
    pub fn transition_rates(&self, s: State) -> Vec<Transition> {
        let r = self.out_rates(s.n, s.m);
        let mut out = Vec::with_capacity(4);
        if r.patient_arrival > 0.0 {
            out.push((State::new(s.n + 1, s.m), r.patient_arrival));
        }
        if r.impatient_arrival > 0.0 {
            out.push((State::new(s.n, s.m + 1), r.impatient_arrival));
        }
        if r.patient_departure > 0.0 {
            out.push((State::new(s.n - 1, s.m), r.patient_departure));
        }
        if r.impatient_departure > 0.0 {
            out.push((State::new(s.n, s.m - 1), r.impatient_departure));
        }
        out
    }
}

impl<'de> Deserialize<'de> for ModelParams {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            alpha: f64,
            beta: f64,
            mu: f64,
            nu: f64,
            theta: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        ModelParams::new(raw.alpha, raw.beta, raw.mu, raw.nu, raw.theta)
            .map_err(serde::de::Error::custom)
    }
}
