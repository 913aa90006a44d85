//! Stationary distribution of the truncated `(N, M)` chain.
//!
//! The lattice is cut at `n_max` and `m_max` with a reflecting boundary:
//! arrivals that would leave the grid are dropped, so the truncated chain
//! keeps a proper stationary law. The balance equations are solved with
//! block Gauss-Seidel sweeps over the `N` levels (each level is a
//! tridiagonal system in `m`, solved exactly) interleaved with an
//! aggregation step over the levels.
//!
//! The aggregation step uses the fact that `N` moves by +-1 only: for the
//! stationary law, the cut between levels `n` and `n + 1` balances,
//! `alpha Q(n) = sum_m pi(n + 1, m) mu (n + 1) / (n + 1 + m)`, so given the
//! conditional law of `M` within each level, the level masses `Q` follow a
//! one-dimensional birth-death product form. `M` moves much faster than `N`
//! when `A` is large, which makes the conditional laws cheap to converge and
//! the level masses expensive; the aggregation step fixes the latter
//! directly.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::grid::TruncatedGrid;
use super::pmf::{BoundaryMass, JointPmf, Moments};
use crate::error::{Error, Result};
use crate::model::ModelParams;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Bound on the L1 norm of the balance residual `pi Q`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_iterations: 20_000,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }
}

/// Stationary law of the truncated chain with solver diagnostics.
#[derive(Debug, Clone)]
pub struct StationaryDistribution {
    pmf: JointPmf,
    pub params: ModelParams,
    /// L1 norm of `pi Q` at the returned solution.
    pub residual: f64,
    pub iterations: usize,
    /// Largest total outflow rate over the grid.
    pub uniformization_rate: f64,
}

impl Deref for StationaryDistribution {
    type Target = JointPmf;

    fn deref(&self) -> &JointPmf {
        &self.pmf
    }
}

/// JSON summary of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSummary {
    pub grid: TruncatedGrid,
    pub residual: f64,
    pub iterations: usize,
    pub uniformization_rate: f64,
    pub boundary_mass: BoundaryMass,
    pub moments: Moments,
    pub empty_probability: f64,
}

impl StationaryDistribution {
    pub fn pmf(&self) -> &JointPmf {
        &self.pmf
    }

    pub fn into_pmf(self) -> JointPmf {
        self.pmf
    }

    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            grid: self.grid(),
            residual: self.residual,
            iterations: self.iterations,
            uniformization_rate: self.uniformization_rate,
            boundary_mass: self.boundary_mass(),
            moments: self.moments(),
            empty_probability: self.prob(0, 0),
        }
    }
}

/// Per-state rates of the truncated generator.
struct TruncatedRates {
    grid: TruncatedGrid,
    alpha: f64,
    beta: f64,
    /// `mu n / (n + m)`
    down_n: Vec<f64>,
    /// `nu m / (n + m) + theta m`
    down_m: Vec<f64>,
    /// total outflow inside the grid
    out: Vec<f64>,
}

impl TruncatedRates {
    fn new(params: &ModelParams, grid: TruncatedGrid) -> Self {
        let mut down_n = Vec::with_capacity(grid.len());
        let mut down_m = Vec::with_capacity(grid.len());
        let mut out = Vec::with_capacity(grid.len());
        for n in 0..=grid.n_max {
            for m in 0..=grid.m_max {
                let r = params.out_rates(n as u64, m as u64);
                let up_n = if n < grid.n_max {
                    r.patient_arrival
                } else {
                    0.0
                };
                let up_m = if m < grid.m_max {
                    r.impatient_arrival
                } else {
                    0.0
                };
                down_n.push(r.patient_departure);
                down_m.push(r.impatient_departure);
                out.push(up_n + up_m + r.patient_departure + r.impatient_departure);
            }
        }
        TruncatedRates {
            grid,
            alpha: params.alpha(),
            beta: params.beta(),
            down_n,
            down_m,
            out,
        }
    }

    fn level_is_closed(&self, n: usize) -> bool {
        n == 0 && self.alpha == 0.0
    }

    fn residual(&self, pi: &[f64]) -> f64 {
        let g = self.grid;
        let w = g.width();
        let mut total = 0.0;
        for n in 0..=g.n_max {
            for m in 0..=g.m_max {
                let i = n * w + m;
                let mut inflow = 0.0;
                if n > 0 {
                    inflow += self.alpha * pi[i - w];
                }
                if m > 0 {
                    inflow += self.beta * pi[i - 1];
                }
                if n < g.n_max {
                    inflow += self.down_n[i + w] * pi[i + w];
                }
                if m < g.m_max {
                    inflow += self.down_m[i + 1] * pi[i + 1];
                }
                total += (inflow - self.out[i] * pi[i]).abs();
            }
        }
        total
    }

    /// One block Gauss-Seidel sweep, levels in increasing `n`.
    fn sweep(&self, pi: &mut [f64], scratch: &mut Scratch) {
        let g = self.grid;
        let w = g.width();
        for n in 0..=g.n_max {
            let base = n * w;
            if self.level_is_closed(n) {
                let mass: f64 = pi[base..base + w].iter().sum();
                self.closed_level(n, &mut pi[base..base + w]);
                pi[base..base + w].iter_mut().for_each(|p| *p *= mass);
                continue;
            }
            for m in 0..w {
                let mut rhs = 0.0;
                if n > 0 {
                    rhs += self.alpha * pi[base - w + m];
                }
                if n < g.n_max {
                    rhs += self.down_n[base + w + m] * pi[base + w + m];
                }
                scratch.rhs[m] = rhs;
            }
            // -beta pi[m-1] + out[m] pi[m] - down_m[m+1] pi[m+1] = rhs[m]
            // Column diagonally dominant, so no pivoting is needed.
            let (c, d) = (&mut scratch.c, &mut scratch.d);
            for m in 0..w {
                let sub = if m > 0 { -self.beta } else { 0.0 };
                let sup = if m + 1 < w {
                    -self.down_m[base + m + 1]
                } else {
                    0.0
                };
                let prev_c = if m > 0 { c[m - 1] } else { 0.0 };
                let prev_d = if m > 0 { d[m - 1] } else { 0.0 };
                let denom = self.out[base + m] - sub * prev_c;
                c[m] = sup / denom;
                d[m] = (scratch.rhs[m] - sub * prev_d) / denom;
            }
            let row = &mut pi[base..base + w];
            row[w - 1] = d[w - 1];
            for m in (0..w - 1).rev() {
                row[m] = d[m] - c[m] * row[m + 1];
            }
        }
    }

    /// Stationary law of `M` within a level that nothing leaves.
    fn closed_level(&self, n: usize, row: &mut [f64]) {
        let base = n * self.grid.width();
        let mut log_w = vec![0.0; row.len()];
        for m in 1..row.len() {
            log_w[m] = log_w[m - 1] + self.beta.ln() - self.down_m[base + m].ln();
        }
        let top = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (r, lw) in row.iter_mut().zip(&log_w) {
            *r = (lw - top).exp();
            total += *r;
        }
        row.iter_mut().for_each(|r| *r /= total);
    }

    /// Rescales the level masses to the birth-death product form implied by
    /// the current conditional laws. Returns `false` (leaving `pi` alone)
    /// when some level has no mass to condition on.
    fn aggregate(&self, pi: &mut [f64], scratch: &mut Scratch) -> bool {
        let g = self.grid;
        let w = g.width();
        let levels = g.n_max + 1;
        let q = &mut scratch.level_mass;
        for n in 0..levels {
            q[n] = pi[n * w..(n + 1) * w].iter().sum();
        }
        let log_q = &mut scratch.level_log_mass;
        if self.alpha == 0.0 {
            log_q[0] = 0.0;
            log_q[1..].iter_mut().for_each(|x| *x = f64::NEG_INFINITY);
        } else {
            log_q[0] = 0.0;
            let ln_alpha = self.alpha.ln();
            for n in 1..levels {
                if !(q[n] > 0.0) {
                    return false;
                }
                let row = &pi[n * w..(n + 1) * w];
                let down: f64 = row
                    .iter()
                    .zip(&self.down_n[n * w..(n + 1) * w])
                    .map(|(p, r)| p * r)
                    .sum::<f64>()
                    / q[n];
                if !(down > 0.0) || !down.is_finite() {
                    return false;
                }
                log_q[n] = log_q[n - 1] + ln_alpha - down.ln();
            }
        }
        let top = log_q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let norm: f64 = log_q.iter().map(|l| (l - top).exp()).sum();
        for n in 0..levels {
            let target = (log_q[n] - top).exp() / norm;
            let row = &mut pi[n * w..(n + 1) * w];
            if q[n] > 0.0 {
                let scale = target / q[n];
                row.iter_mut().for_each(|p| *p *= scale);
            } else if target > 0.0 {
                return false;
            }
        }
        true
    }
}

struct Scratch {
    rhs: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
    level_mass: Vec<f64>,
    level_log_mass: Vec<f64>,
}

impl Scratch {
    fn new(grid: TruncatedGrid) -> Self {
        let w = grid.width();
        Scratch {
            rhs: vec![0.0; w],
            c: vec![0.0; w],
            d: vec![0.0; w],
            level_mass: vec![0.0; grid.n_max + 1],
            level_log_mass: vec![0.0; grid.n_max + 1],
        }
    }
}

fn normalize(pi: &mut [f64]) {
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
}

/// L1 norm of `pi Q` for the reflecting truncation of `params` on `grid`.
pub fn balance_residual(params: &ModelParams, pmf: &JointPmf) -> f64 {
    TruncatedRates::new(params, pmf.grid()).residual(pmf.values())
}

/// Largest total outflow rate over the truncated grid.
pub fn uniformization_rate(params: &ModelParams, grid: TruncatedGrid) -> f64 {
    TruncatedRates::new(params, grid)
        .out
        .into_iter()
        .fold(0.0, f64::max)
}

pub fn solve_stationary(
    params: &ModelParams,
    grid: TruncatedGrid,
    tol: f64,
) -> Result<StationaryDistribution> {
    solve_stationary_with(params, grid, &SolverOptions::with_tol(tol))
}

/// Solves on the automatically sized grid with default options.
pub fn solve_auto(params: &ModelParams) -> Result<StationaryDistribution> {
    solve_stationary_with(
        params,
        TruncatedGrid::auto(params)?,
        &SolverOptions::default(),
    )
}

pub fn solve_stationary_with(
    params: &ModelParams,
    grid: TruncatedGrid,
    options: &SolverOptions,
) -> Result<StationaryDistribution> {
    params.require_stable()?;
    if !(options.tol > 0.0) {
        return Err(Error::OutOfDomain(format!(
            "solver tolerance must be > 0, got {}",
            options.tol
        )));
    }
    let rates = TruncatedRates::new(params, grid);
    let mut scratch = Scratch::new(grid);
    let mut pi = vec![1.0 / grid.len() as f64; grid.len()];
    let mut residual = f64::INFINITY;
    for iteration in 1..=options.max_iterations {
        rates.sweep(&mut pi, &mut scratch);
        normalize(&mut pi);
        if rates.aggregate(&mut pi, &mut scratch) {
            normalize(&mut pi);
        }
        residual = rates.residual(&pi);
        if residual <= options.tol {
            let pmf = JointPmf::new(grid, pi)?;
            return Ok(StationaryDistribution {
                pmf,
                params: *params,
                residual,
                iterations: iteration,
                uniformization_rate: rates.out.iter().cloned().fold(0.0, f64::max),
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: options.max_iterations,
        residual,
    })
}
