//! `impatience`: command-line driver for the exact, asymptotic, simulated and
//! closed-loop experiments. Every subcommand writes CSV/JSON data plus a
//! `manifest.json` into `--out`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "impatience",
    version,
    about = "Two-class queue with impatient customers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
///
/// Rates come from `--config` (keys `alpha`, `beta`, `mu`, `nu`, `theta`,
/// and `beta_ex` for the closed loop), falling back to
/// `alpha = 0.5, beta = 20, mu = nu = theta = 1`. `--rho` then sets
/// `alpha = rho * mu` and `--A` sets `beta = A * theta`.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Flat key-value (TOML syntax) or JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Scale parameter A = beta / theta.
    #[arg(long = "A", value_name = "A")]
    pub a: Option<f64>,
    /// Load of the patient class, alpha / mu.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Solver tolerance on the L1 balance residual.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Truncation as `n_max,m_max`; sized from the parameters when omitted.
    #[arg(long, value_name = "N_MAX,M_MAX")]
    pub grid: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact stationary distribution on a truncated grid.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Time-weighted empirical distribution from Gillespie replications.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e5)]
        t_end: f64,
        #[arg(long, default_value_t = 100.0)]
        burn_in: f64,
        #[arg(long, default_value_t = 4)]
        replications: usize,
        /// Compare against the exact solution and report total variation.
        #[arg(long)]
        compare: bool,
    },
    /// H, g and sharp estimates at probe points, plus the Gaussian limit.
    Asymptotics {
        #[command(flatten)]
        common: Common,
        /// Probe point `x,y`; repeatable. Defaults to the fluid point.
        #[arg(long = "point", value_name = "X,Y")]
        points: Vec<String>,
    },
    /// Exact against sharp density over a list of A values.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "20,40,80,160")]
        a_list: String,
        /// Probe point `x,y`; repeatable. Defaults to the fluid point.
        #[arg(long = "probe", value_name = "X,Y")]
        probes: Vec<String>,
    },
    /// Closed-loop fixed points over a list of total loads.
    MobileSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "0.9,0.95,0.99")]
        rho_tot_list: String,
    },
    /// Coupled run checking that M' dominates M pathwise.
    Dominance {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1_000_000)]
        events: u64,
    },
    /// Surface of H and g for external plotting.
    FigureData {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3.0)]
        x_max: f64,
        #[arg(long, default_value_t = 3.0)]
        y_max: f64,
        #[arg(long, default_value_t = 60)]
        steps: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { common } => commands::solve(&common),
        Command::Simulate {
            common,
            t_end,
            burn_in,
            replications,
            compare,
        } => commands::simulate(&common, t_end, burn_in, replications, compare),
        Command::Asymptotics { common, points } => commands::asymptotics(&common, &points),
        Command::Convergence {
            common,
            a_list,
            probes,
        } => commands::convergence(&common, &a_list, &probes),
        Command::MobileSweep {
            common,
            rho_tot_list,
        } => commands::mobile_sweep(&common, &rho_tot_list),
        Command::Dominance { common, events } => commands::dominance(&common, events),
        Command::FigureData {
            common,
            x_max,
            y_max,
            steps,
        } => commands::figure_data(&common, x_max, y_max, steps),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
