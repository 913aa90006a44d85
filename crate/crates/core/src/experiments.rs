//! Experiment drivers behind the command-line tool: convergence studies in
//! `A`, surface tabulation, closed-loop sweeps and run manifests.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{decay_h, sharp_density, surface_grid, SurfacePoint};
use crate::error::{Error, Result};
use crate::exact::{solve_stationary_with, SolverOptions, TruncatedGrid};
use crate::mobile::{
    mean_growth_check, sweep, throughput_asymptotics, FixedPointOptions, GrowthReport, MobileInputs,
};
use crate::model::ModelParams;
use crate::sim::SimConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Solve,
    Simulate,
    AsymptoticGrid,
    Convergence,
    MobileSweep,
    Dominance,
}

/// Everything needed to re-run an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub params: Option<ModelParams>,
    #[serde(default)]
    pub mobile: Option<MobileInputs>,
    #[serde(default)]
    pub grid: Option<TruncatedGrid>,
    pub tol: f64,
    #[serde(default)]
    pub sim: Option<SimConfig>,
    #[serde(default)]
    pub a_values: Vec<f64>,
    #[serde(default)]
    pub probes: Vec<(f64, f64)>,
    #[serde(default)]
    pub rho_tot_list: Vec<f64>,
    /// Extra numeric settings (surface extent, asymptotic point, ...).
    #[serde(default)]
    pub settings: std::collections::BTreeMap<String, f64>,
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, out_dir: impl Into<PathBuf>) -> Self {
        ExperimentSpec {
            kind,
            params: None,
            mobile: None,
            grid: None,
            tol: crate::exact::DEFAULT_TOL,
            sim: None,
            a_values: Vec::new(),
            probes: Vec::new(),
            rho_tot_list: Vec::new(),
            settings: Default::default(),
            out_dir: out_dir.into(),
        }
    }

    /// Checks the fields required by `kind` and creates the output directory.
    pub fn validate(&self) -> Result<()> {
        let missing = |what: &str| {
            Err(Error::Config(format!(
                "{:?} experiment needs {what}",
                self.kind
            )))
        };
        match self.kind {
            ExperimentKind::Solve | ExperimentKind::AsymptoticGrid if self.params.is_none() => {
                return missing("model parameters")
            }
            ExperimentKind::Simulate | ExperimentKind::Dominance
                if self.params.is_none() || self.sim.is_none() =>
            {
                return missing("model parameters and a simulation configuration")
            }
            ExperimentKind::Convergence if self.params.is_none() || self.a_values.is_empty() => {
                return missing("model parameters and a list of A values")
            }
            ExperimentKind::MobileSweep
                if self.mobile.is_none() || self.rho_tot_list.is_empty() =>
            {
                return missing("closed-loop inputs and a list of total loads")
            }
            _ => {}
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol",
                value: self.tol,
                reason: "must be > 0",
            });
        }
        fs::create_dir_all(&self.out_dir)?;
        let probe = self.out_dir.join(".write-check");
        fs::write(&probe, b"")?;
        fs::remove_file(probe)?;
        Ok(())
    }
}

/// Written next to every output set as `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub spec: ExperimentSpec,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(spec: ExperimentSpec, outputs: Vec<String>) -> Self {
        Manifest {
            tool: "impatience".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            spec,
            outputs,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let mut f = fs::File::create(&path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "A")]
    pub a: f64,
    pub x: f64,
    pub y: f64,
    pub n: usize,
    pub m: usize,
    pub exact: f64,
    pub sharp: f64,
    pub ratio: f64,
    /// `-(1/A) log exact`.
    pub decay_estimate: f64,
    #[serde(rename = "H")]
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Probes dropped because they lie on an axis.
    pub excluded: Vec<(f64, f64)>,
}

/// Compares exact lattice probabilities with the sharp estimate.
///
/// For each `A` the model is rescaled to `beta = A theta` and solved on an
/// auto-sized grid. Probe `(x, y)` is read at the lattice point
/// `(floor(Ax), floor(Ay))`, and the sharp estimate and `H` are evaluated at
/// that same point, `(n/A, m/A)`.
pub fn run_convergence(
    params: &ModelParams,
    a_values: &[f64],
    probes: &[(f64, f64)],
    options: &SolverOptions,
) -> Result<ConvergenceReport> {
    params.require_stable()?;
    let (kept, excluded): (Vec<_>, Vec<_>) = probes.iter().partition(|(x, y)| *x > 0.0 && *y > 0.0);
    let per_a: Vec<Result<Vec<ConvergenceRow>>> = a_values
        .par_iter()
        .map(|&a| {
            let p = params.with_scale(a)?;
            let dist = solve_stationary_with(&p, TruncatedGrid::auto(&p)?, options)?;
            let rho = p.derived().rho;
            kept.iter()
                .map(|&(x, y)| {
                    let n = (a * x).floor() as usize;
                    let m = (a * y).floor() as usize;
                    let (xl, yl) = (n as f64 / a, m as f64 / a);
                    if n == 0 || m == 0 {
                        return Err(Error::OutOfDomain(format!(
                            "probe ({x}, {y}) rounds onto an axis at A = {a}"
                        )));
                    }
                    let exact = dist.prob(n, m);
                    let sharp = sharp_density(xl, yl, a, &p)?;
                    Ok(ConvergenceRow {
                        a,
                        x,
                        y,
                        n,
                        m,
                        exact,
                        sharp,
                        ratio: exact / sharp,
                        decay_estimate: -exact.ln() / a,
                        h: decay_h(xl, yl, rho)?,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_a {
        rows.extend(r?);
    }
    Ok(ConvergenceReport { rows, excluded })
}

/// Surface of `H` and `g` over `[0, x_max] x [0, y_max]`.
pub fn run_figure_data(
    params: &ModelParams,
    x_max: f64,
    y_max: f64,
    steps: usize,
) -> Result<Vec<SurfacePoint>> {
    surface_grid(params, x_max, y_max, steps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobileSweepRow {
    pub rho_tot: f64,
    pub beta_net: f64,
    #[serde(rename = "mean_N")]
    pub mean_n: f64,
    #[serde(rename = "mean_M")]
    pub mean_m: f64,
    pub gamma: f64,
    #[serde(rename = "Gamma")]
    pub big_gamma: f64,
    #[serde(rename = "A_mob")]
    pub a_mob: f64,
    pub empty_probability: f64,
    pub gamma_asym: f64,
    #[serde(rename = "Gamma_asym")]
    pub big_gamma_asym: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobileSweepReport {
    pub rows: Vec<MobileSweepRow>,
    pub growth: GrowthReport,
    /// Whether `beta_net` increases strictly along the sweep.
    pub beta_net_increasing: bool,
}

pub fn run_mobile_sweep(
    base: &MobileInputs,
    rho_tots: &[f64],
    options: &FixedPointOptions,
) -> Result<MobileSweepReport> {
    let scenarios = sweep(base, rho_tots, options)?;
    let rows = scenarios
        .iter()
        .map(|s| {
            let t = s.throughputs()?;
            let asym = throughput_asymptotics(s.inputs.rho(), s.rho_tot)?;
            Ok(MobileSweepRow {
                rho_tot: s.rho_tot,
                beta_net: s.beta_net,
                mean_n: s.mean_n,
                mean_m: s.mean_m,
                gamma: t.gamma,
                big_gamma: t.big_gamma,
                a_mob: s.a_mob()?,
                empty_probability: s.empty_probability,
                gamma_asym: asym.gamma,
                big_gamma_asym: asym.big_gamma,
                residual: s.residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut by_load: Vec<&MobileSweepRow> = rows.iter().collect();
    by_load.sort_by(|a, b| a.rho_tot.total_cmp(&b.rho_tot));
    let beta_net_increasing = by_load.windows(2).all(|w| w[1].beta_net > w[0].beta_net);
    Ok(MobileSweepReport {
        growth: mean_growth_check(&scenarios)?,
        rows,
        beta_net_increasing,
    })
}

/// Serialises `rows` as CSV with a header taken from the field names.
pub fn write_rows_csv<T: Serialize, W: Write>(rows: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
