use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{bail, Context, Result};
use impatience::asymptotics::{asymptotic_point, gaussian_limit, write_surface_csv};
use impatience::config::parse_list;
use impatience::exact::{solve_stationary_with, SolverOptions, DEFAULT_TOL};
use impatience::experiments::{
    run_convergence, run_figure_data, run_mobile_sweep, write_rows_csv, ExperimentKind,
    ExperimentSpec, Manifest,
};
use impatience::mobile::FixedPointOptions;
use impatience::sim::{coupled_dominance_run, estimate_stationary, fluid_start};
use impatience::{Config, MobileInputs, ModelParams, SimConfig, TruncatedGrid};
use serde_json::json;

use crate::Common;

const DEFAULTS: [(&str, f64); 6] = [
    ("alpha", 0.5),
    ("beta", 20.0),
    ("mu", 1.0),
    ("nu", 1.0),
    ("theta", 1.0),
    ("beta_ex", 0.0),
];

fn config(common: &Common) -> Result<Config> {
    let mut cfg = match &common.config {
        Some(path) => {
            Config::from_path(path).with_context(|| format!("reading {}", path.display()))?
        }
        None => Config::default(),
    };
    for (key, value) in DEFAULTS {
        if cfg.get(key).is_none() {
            cfg.set(key, value);
        }
    }
    let mu = cfg.get_f64("mu")?.unwrap_or(1.0);
    let theta = cfg.get_f64("theta")?.unwrap_or(1.0);
    if let Some(rho) = common.rho {
        cfg.set("alpha", rho * mu);
    }
    if let Some(a) = common.a {
        cfg.set("beta", a * theta);
    }
    Ok(cfg)
}

fn model_params(common: &Common) -> Result<ModelParams> {
    Ok(config(common)?.model_params()?)
}

fn tol(common: &Common) -> f64 {
    common.tol.unwrap_or(DEFAULT_TOL)
}

fn grid(common: &Common, params: &ModelParams) -> Result<TruncatedGrid> {
    match &common.grid {
        None => Ok(TruncatedGrid::auto(params)?),
        Some(text) => {
            let v = parse_list(text)?;
            if v.len() != 2 || v.iter().any(|x| *x < 0.0 || x.fract() != 0.0) {
                bail!("--grid expects two non-negative integers `n_max,m_max`, got `{text}`");
            }
            Ok(TruncatedGrid::new(v[0] as usize, v[1] as usize)?)
        }
    }
}

fn points(texts: &[String], params: &ModelParams) -> Result<Vec<(f64, f64)>> {
    if texts.is_empty() {
        let d = params.derived();
        return Ok(vec![(d.x_star, d.y_star)]);
    }
    texts
        .iter()
        .map(|t| match parse_list(t)?.as_slice() {
            [x, y] => Ok((*x, *y)),
            _ => bail!("expected a point `x,y`, got `{t}`"),
        })
        .collect()
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    serde_json::to_writer_pretty(create(dir, name)?, value)?;
    Ok(())
}

fn finish(spec: ExperimentSpec, outputs: &[&str]) -> Result<()> {
    let dir = spec.out_dir.clone();
    let manifest =
        Manifest::new(spec, outputs.iter().map(|s| s.to_string()).collect()).write(&dir)?;
    for name in outputs {
        println!("wrote {}", dir.join(name).display());
    }
    println!("wrote {}", manifest.display());
    Ok(())
}

fn base_spec(kind: ExperimentKind, common: &Common) -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(kind, &common.out);
    spec.tol = tol(common);
    spec
}

pub fn solve(common: &Common) -> Result<()> {
    let params = model_params(common)?;
    let grid = grid(common, &params)?;
    let mut spec = base_spec(ExperimentKind::Solve, common);
    spec.params = Some(params);
    spec.grid = Some(grid);
    spec.validate()?;

    let dist = solve_stationary_with(&params, grid, &SolverOptions::with_tol(spec.tol))?;
    let summary = dist.summary();
    dist.write_csv(create(&spec.out_dir, "pmf.csv")?)?;
    write_json(
        &spec.out_dir,
        "summary.json",
        &json!({ "params": params, "derived": params.derived(), "solve": summary }),
    )?;
    println!(
        "E(N) = {:.6}  E(M) = {:.6}  P(0,0) = {:.6e}  residual = {:.2e}  iterations = {}",
        summary.moments.mean_n,
        summary.moments.mean_m,
        summary.empty_probability,
        summary.residual,
        summary.iterations
    );
    finish(spec, &["pmf.csv", "summary.json"])
}

pub fn simulate(
    common: &Common,
    t_end: f64,
    burn_in: f64,
    replications: usize,
    compare: bool,
) -> Result<()> {
    let params = model_params(common)?;
    let sim = SimConfig::new(common.seed, t_end, burn_in, replications)?;
    let mut spec = base_spec(ExperimentKind::Simulate, common);
    spec.params = Some(params);
    spec.sim = Some(sim);
    if compare {
        spec.grid = Some(grid(common, &params)?);
    }
    spec.validate()?;

    let empirical = estimate_stationary(&params, &sim)?;
    let moments = empirical.pmf.moments();
    let tv = match spec.grid {
        Some(g) => Some(
            solve_stationary_with(&params, g, &SolverOptions::with_tol(spec.tol))?
                .total_variation(&empirical.pmf),
        ),
        None => None,
    };
    empirical
        .pmf
        .write_csv(create(&spec.out_dir, "empirical.csv")?)?;
    write_rows_csv(
        &empirical.replication_means,
        create(&spec.out_dir, "replications.csv")?,
    )?;
    write_json(
        &spec.out_dir,
        "summary.json",
        &json!({
            "params": params,
            "events": empirical.events,
            "total_time": empirical.total_time,
            "moments": moments,
            "standard_errors": empirical.standard_errors(),
            "total_variation_to_exact": tv,
        }),
    )?;
    println!(
        "E(N) = {:.4}  E(M) = {:.4}  events = {}",
        moments.mean_n, moments.mean_m, empirical.events
    );
    if let Some(tv) = tv {
        println!("total variation to exact = {tv:.4}");
    }
    finish(spec, &["empirical.csv", "replications.csv", "summary.json"])
}

pub fn asymptotics(common: &Common, texts: &[String]) -> Result<()> {
    let params = model_params(common)?;
    let probes = points(texts, &params)?;
    let a = params.derived().a;
    let mut spec = base_spec(ExperimentKind::AsymptoticGrid, common);
    spec.params = Some(params);
    spec.probes = probes.clone();
    spec.validate()?;

    let rows = probes
        .iter()
        .map(|&(x, y)| asymptotic_point(x, y, a, &params).with_context(|| format!("at ({x}, {y})")))
        .collect::<Result<Vec<_>>>()?;
    write_rows_csv(&rows, create(&spec.out_dir, "asymptotics.csv")?)?;
    write_json(
        &spec.out_dir,
        "summary.json",
        &json!({ "params": params, "derived": params.derived(), "gaussian_limit": gaussian_limit(&params)? }),
    )?;
    finish(spec, &["asymptotics.csv", "summary.json"])
}

pub fn convergence(common: &Common, a_list: &str, texts: &[String]) -> Result<()> {
    let params = model_params(common)?;
    let mut spec = base_spec(ExperimentKind::Convergence, common);
    spec.params = Some(params);
    spec.a_values = parse_list(a_list)?;
    spec.probes = points(texts, &params)?;
    spec.validate()?;

    let report = run_convergence(
        &params,
        &spec.a_values,
        &spec.probes,
        &SolverOptions::with_tol(spec.tol),
    )?;
    write_rows_csv(&report.rows, create(&spec.out_dir, "convergence.csv")?)?;
    for (x, y) in &report.excluded {
        eprintln!("probe ({x}, {y}) lies on an axis and was excluded");
    }
    write_json(
        &spec.out_dir,
        "summary.json",
        &json!({ "excluded": report.excluded }),
    )?;
    for r in &report.rows {
        println!(
            "A = {:>6}  ({}, {})  exact/sharp = {:.6}",
            r.a, r.x, r.y, r.ratio
        );
    }
    finish(spec, &["convergence.csv", "summary.json"])
}

pub fn mobile_sweep(common: &Common, rho_tot_list: &str) -> Result<()> {
    let cfg = config(common)?;
    let base: MobileInputs = cfg.mobile_inputs()?;
    let loads = parse_list(rho_tot_list)?;
    if let Some(bad) = loads
        .iter()
        .find(|r| !(**r < 1.0))
    {
        bail!("total load {bad} is not below 1");
    }
    let mut spec = base_spec(ExperimentKind::MobileSweep, common);
    spec.mobile = Some(base);
    spec.rho_tot_list = loads;
    spec.validate()?;

    let mut options = FixedPointOptions::default();
    if let Some(t) = common.tol {
        options.solver.tol = t;
    }
    let report = run_mobile_sweep(&base, &spec.rho_tot_list, &options)?;
    write_rows_csv(&report.rows, create(&spec.out_dir, "mobile_sweep.csv")?)?;
    write_json(
        &spec.out_dir,
        "summary.json",
        &json!({ "growth": report.growth, "beta_net_increasing": report.beta_net_increasing, "options": options }),
    )?;
    for r in &report.rows {
        println!(
            "rho_tot = {:.4}  beta_net = {:.6}  E(N) = {:.4}  E(M) = {:.4}  P(0,0) = {:.6}",
            r.rho_tot, r.beta_net, r.mean_n, r.mean_m, r.empty_probability
        );
    }
    finish(spec, &["mobile_sweep.csv", "summary.json"])
}

pub fn dominance(common: &Common, events: u64) -> Result<()> {
    let params = model_params(common)?;
    let sim = SimConfig::new(common.seed, f64::MAX, 0.0, 1)?.with_max_events(events);
    let mut spec = base_spec(ExperimentKind::Dominance, common);
    spec.params = Some(params);
    spec.sim = Some(sim);
    spec.validate()?;

    let report = coupled_dominance_run(&params, &sim, fluid_start(&params))?;
    write_json(
        &spec.out_dir,
        "dominance.json",
        &serde_json::to_value(&report)?,
    )?;
    println!(
        "{} events, {} violations, max gap M' - M = {}",
        report.events, report.violations, report.max_gap
    );
    finish(spec, &["dominance.json"])
}

pub fn figure_data(common: &Common, x_max: f64, y_max: f64, steps: usize) -> Result<()> {
    let params = model_params(common)?;
    let mut spec = base_spec(ExperimentKind::AsymptoticGrid, common);
    spec.params = Some(params);
    spec.settings.insert("x_max".into(), x_max);
    spec.settings.insert("y_max".into(), y_max);
    spec.settings.insert("steps".into(), steps as f64);
    spec.validate()?;

    let surface = run_figure_data(&params, x_max, y_max, steps)?;
    write_surface_csv(&surface, create(&spec.out_dir, "surface.csv")?)?;
    finish(spec, &["surface.csv"])
}
