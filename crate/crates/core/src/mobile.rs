//! Closed-loop cell model.
//!
//! Impatient customers that abandon re-enter the cell, so the impatient
//! arrival rate is `beta = beta_ex + beta_net` with the balance
//! `theta E(M) = beta_net`. A solution exists iff
//! `rho_tot = alpha/mu + beta_ex/nu < 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{solve_stationary_with, BoundaryMass, SolverOptions, TruncatedGrid};
use crate::model::ModelParams;

/// Exogenous rates of a closed-loop scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobileInputs {
    pub alpha: f64,
    pub beta_ex: f64,
    pub mu: f64,
    pub nu: f64,
    pub theta: f64,
}

impl MobileInputs {
    pub fn new(alpha: f64, beta_ex: f64, mu: f64, nu: f64, theta: f64) -> Result<Self> {
        // validates the rates with beta_ex standing in for beta
        ModelParams::new(alpha, beta_ex, mu, nu, theta)?;
        if !(nu > 0.0) {
            return Err(Error::InvalidParameter {
                name: "nu",
                value: nu,
                reason: "must be > 0 in the closed loop",
            });
        }
        Ok(MobileInputs {
            alpha,
            beta_ex,
            mu,
            nu,
            theta,
        })
    }

    /// Inputs at total load `rho_tot` with the other rates of `self`.
    pub fn at_total_load(&self, rho_tot: f64) -> Result<Self> {
        let beta_ex = self.nu * (rho_tot - self.rho());
        if !(beta_ex >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "rho_tot",
                value: rho_tot,
                reason: "must be at least alpha/mu",
            });
        }
        Self::new(self.alpha, beta_ex, self.mu, self.nu, self.theta)
    }

    pub fn rho(&self) -> f64 {
        self.alpha / self.mu
    }

    pub fn rho_tot(&self) -> f64 {
        self.rho() + self.beta_ex / self.nu
    }

    pub fn require_solvable(&self) -> Result<()> {
        if self.rho_tot() < 1.0 {
            Ok(())
        } else {
            Err(Error::Unstable {
                rho: self.rho_tot(),
            })
        }
    }

    /// Open-loop model with impatient arrival rate `beta_ex + beta_net`.
    pub fn params_with(&self, beta_net: f64) -> Result<ModelParams> {
        ModelParams::new(
            self.alpha,
            self.beta_ex + beta_net,
            self.mu,
            self.nu,
            self.theta,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum FixedPointMethod {
    /// `b <- (1 - lambda) b + lambda theta E(M)(b)`.
    Damped { lambda: f64 },
    /// Illinois regula falsi on `theta E(M)(b) - b` after bracketing.
    Bracketed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointOptions {
    /// Bound on `|theta E(M) - beta_net|`.
    pub tol: f64,
    pub max_iterations: usize,
    pub method: FixedPointMethod,
    /// Starting value of `beta_net`.
    pub initial: f64,
    pub solver: SolverOptions,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions {
            tol: 1e-9,
            max_iterations: 200,
            method: FixedPointMethod::Bracketed,
            initial: 0.0,
            solver: SolverOptions {
                tol: 1e-12,
                ..SolverOptions::default()
            },
        }
    }
}

/// A solved closed-loop scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobileScenario {
    pub inputs: MobileInputs,
    pub rho_tot: f64,
    pub beta_net: f64,
    pub solved_params: ModelParams,
    /// `|theta E(M) - beta_net|` at the accepted point.
    pub residual: f64,
    pub iterations: usize,
    pub mean_n: f64,
    pub mean_m: f64,
    pub empty_probability: f64,
    pub grid: TruncatedGrid,
    pub boundary_mass: BoundaryMass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Throughputs {
    pub gamma: f64,
    #[serde(rename = "Gamma")]
    pub big_gamma: f64,
}

struct Evaluation {
    beta_net: f64,
    gap: f64,
    scenario: MobileScenario,
}

fn evaluate(
    inputs: &MobileInputs,
    beta_net: f64,
    options: &FixedPointOptions,
    iterations: usize,
) -> Result<Evaluation> {
    let params = inputs.params_with(beta_net)?;
    let grid = TruncatedGrid::auto(&params)?;
    let dist = solve_stationary_with(&params, grid, &options.solver)?;
    let m = dist.moments();
    let image = inputs.theta * m.mean_m;
    Ok(Evaluation {
        beta_net,
        gap: image - beta_net,
        scenario: MobileScenario {
            inputs: *inputs,
            rho_tot: inputs.rho_tot(),
            beta_net,
            solved_params: params,
            residual: (image - beta_net).abs(),
            iterations,
            mean_n: m.mean_n,
            mean_m: m.mean_m,
            empty_probability: dist.prob(0, 0),
            grid,
            boundary_mass: dist.boundary_mass(),
        },
    })
}

/// Solves `theta E(M) = beta_net`, re-solving the stationary law (on an
/// auto-sized grid) at every iterate.
pub fn solve_fixed_point(
    inputs: &MobileInputs,
    options: &FixedPointOptions,
) -> Result<MobileScenario> {
    inputs.require_solvable()?;
    if inputs.rho() >= 1.0 {
        return Err(Error::Unstable { rho: inputs.rho() });
    }
    match options.method {
        FixedPointMethod::Damped { lambda } => damped(inputs, options, lambda),
        FixedPointMethod::Bracketed => bracketed(inputs, options),
    }
}

fn damped(
    inputs: &MobileInputs,
    options: &FixedPointOptions,
    lambda: f64,
) -> Result<MobileScenario> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            reason: "must lie in (0, 1]",
        });
    }
    let mut b = options.initial.max(0.0);
    let mut history = Vec::new();
    for it in 1..=options.max_iterations {
        let e = evaluate(inputs, b, options, it)?;
        history.push(e.scenario.residual);
        if e.scenario.residual <= options.tol {
            return Ok(e.scenario);
        }
        b = (b + lambda * e.gap).max(0.0);
    }
    Err(not_reached(options.max_iterations, history))
}

fn not_reached(iterations: usize, mut history: Vec<f64>) -> Error {
    let keep = history.len().saturating_sub(10);
    history.drain(..keep);
    Error::FixedPointNotReached {
        iterations,
        history,
    }
}

fn bracketed(inputs: &MobileInputs, options: &FixedPointOptions) -> Result<MobileScenario> {
    let mut history = Vec::new();
    let mut it = 0;
    let mut eval = |b: f64, history: &mut Vec<f64>| -> Result<Evaluation> {
        it += 1;
        if it > options.max_iterations {
            return Err(not_reached(options.max_iterations, history.clone()));
        }
        let e = evaluate(inputs, b, options, it)?;
        history.push(e.scenario.residual);
        Ok(e)
    };

    // theta E(M) - b is positive at b = 0 and negative for large b
    let first = eval(options.initial.max(0.0), &mut history)?;
    if first.scenario.residual <= options.tol {
        return Ok(first.scenario);
    }
    let (mut lo, mut hi) = if first.gap > 0.0 {
        let mut lo = first;
        let mut step = lo.beta_net.max(1.0);
        loop {
            let e = eval(lo.beta_net + step, &mut history)?;
            if e.scenario.residual <= options.tol {
                return Ok(e.scenario);
            }
            if e.gap < 0.0 {
                break (lo, e);
            }
            lo = e;
            step *= 2.0;
        }
    } else {
        let lo = eval(0.0, &mut history)?;
        if lo.scenario.residual <= options.tol {
            return Ok(lo.scenario);
        }
        (lo, first)
    };

    let mut side = 0i8;
    loop {
        let (fl, fh) = (lo.gap, hi.gap);
        let b = (lo.beta_net * fh - hi.beta_net * fl) / (fh - fl);
        let e = eval(b, &mut history)?;
        if e.scenario.residual <= options.tol {
            return Ok(e.scenario);
        }
        if e.gap > 0.0 {
            lo = e;
            if side == 1 {
                hi.gap *= 0.5;
            }
            side = 1;
        } else {
            hi = e;
            if side == -1 {
                lo.gap *= 0.5;
            }
            side = -1;
        }
    }
}

/// Heavy-traffic scale `A_mob = -log(1 - rho_tot) / H(0,0)` with
/// `H(0,0) = 1 - log(1 - rho)`.
pub fn a_mob(rho_tot: f64, rho: f64) -> Result<f64> {
    Ok(-(-rho_tot).ln_1p() / empty_decay(rho_tot, rho)?)
}

fn empty_decay(rho_tot: f64, rho: f64) -> Result<f64> {
    if !(rho_tot > 0.0 && rho_tot < 1.0) {
        return Err(Error::InvalidParameter {
            name: "rho_tot",
            value: rho_tot,
            reason: "must lie in (0, 1)",
        });
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "must lie in [0, 1)",
        });
    }
    Ok(1.0 - (-rho).ln_1p())
}

impl MobileScenario {
    /// `gamma = rho / E(N)` and `Gamma = (rho_tot - rho + beta_net/nu) / E(M) - theta/nu`.
    pub fn throughputs(&self) -> Result<Throughputs> {
        if !(self.mean_n > 0.0 && self.mean_m > 0.0) {
            return Err(Error::OutOfDomain(format!(
                "throughputs need positive mean occupancies, got E(N) = {}, E(M) = {}",
                self.mean_n, self.mean_m
            )));
        }
        let i = &self.inputs;
        let rho = i.rho();
        Ok(Throughputs {
            gamma: rho / self.mean_n,
            big_gamma: (self.rho_tot - rho + self.beta_net / i.nu) / self.mean_m - i.theta / i.nu,
        })
    }

    pub fn a_mob(&self) -> Result<f64> {
        a_mob(self.rho_tot, self.inputs.rho())
    }
}

/// Heavy-traffic equivalents of the throughputs as `rho_tot -> 1`.
pub fn throughput_asymptotics(rho: f64, rho_tot: f64) -> Result<Throughputs> {
    let h00 = empty_decay(rho_tot, rho)?;
    let l = (-rho_tot).ln_1p();
    Ok(Throughputs {
        gamma: -h00 * (1.0 - rho) / l,
        big_gamma: -h00 * (rho_tot - rho) / l,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub rho_tot: f64,
    pub a_mob: f64,
    /// `E(N) / (A_mob x*)`.
    pub ratio_n: f64,
    /// `E(M) / A_mob`.
    pub ratio_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// `|ratio_n - 1|` strictly decreasing along increasing `rho_tot`.
    pub n_approaches_one: bool,
    pub m_approaches_one: bool,
}

fn strictly_approaches_one(values: impl Iterator<Item = f64>) -> bool {
    let gaps: Vec<f64> = values.map(|v| (v - 1.0).abs()).collect();
    gaps.windows(2).all(|w| w[1] < w[0])
}

/// Tabulates occupancy ratios against the heavy-traffic scale.
pub fn mean_growth_check(scenarios: &[MobileScenario]) -> Result<GrowthReport> {
    let mut sorted: Vec<&MobileScenario> = scenarios.iter().collect();
    sorted.sort_by(|a, b| a.rho_tot.total_cmp(&b.rho_tot));
    let rows = sorted
        .iter()
        .map(|s| {
            let rho = s.inputs.rho();
            let a = s.a_mob()?;
            Ok(GrowthRow {
                rho_tot: s.rho_tot,
                a_mob: a,
                ratio_n: s.mean_n / (a * rho / (1.0 - rho)),
                ratio_m: s.mean_m / a,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthReport {
        n_approaches_one: strictly_approaches_one(rows.iter().map(|r| r.ratio_n)),
        m_approaches_one: strictly_approaches_one(rows.iter().map(|r| r.ratio_m)),
        rows,
    })
}

/// Solves one scenario per total load, concurrently, keeping the input order.
pub fn sweep(
    base: &MobileInputs,
    rho_tots: &[f64],
    options: &FixedPointOptions,
) -> Result<Vec<MobileScenario>> {
    rho_tots
        .par_iter()
        .map(|&rt| {
            if !(rt < 1.0) {
                return Err(Error::Unstable { rho: rt });
            }
            solve_fixed_point(&base.at_total_load(rt)?, options)
        })
        .collect()
}

/// Second starting point for the uniqueness check: twice the heavy-traffic
/// estimate `theta A_mob` of the feedback rate.
pub fn upper_initial_guess(inputs: &MobileInputs) -> Result<f64> {
    Ok(2.0 * inputs.theta * a_mob(inputs.rho_tot(), inputs.rho())?.max(1.0))
}
