//! `qho-relax`: CSV and JSON data for thermally bathed oscillator relaxation.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::{CommandKind, GridSpec, RunConfig, StateSpec, VarianceKind, VerifySet};

#[derive(Parser)]
#[command(
    name = "qho-relax",
    version,
    about = "Relaxation dynamics of a thermally bathed harmonic oscillator"
)]
struct Cli {
    /// Declarative TOML run file; replaces the subcommand and its flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Fock-space truncation for oracle runs.
    #[arg(long, global = true, env = "QHO_RELAX_TRUNCATION")]
    truncation: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Default)]
struct Common {
    /// Oscillator frequency ω.
    #[arg(long)]
    omega: Option<f64>,
    /// Damping rate Γ.
    #[arg(long)]
    gamma: Option<f64>,
    /// Damping ratio Γ/ω, overriding --omega.
    #[arg(long)]
    gamma_ratio: Option<f64>,
    /// Bath occupation N_β; repeat or comma-separate for several series.
    #[arg(long = "nbeta", value_delimiter = ',')]
    n_beta: Vec<f64>,
    /// Bath temperature k_B T instead of --nbeta.
    #[arg(long)]
    temperature: Option<f64>,
    /// Gaussian initial state, e.g. `r=1` or `r=0,alpha1=1`.
    #[arg(long)]
    gaussian: Vec<String>,
    /// Fock initial state, e.g. `n=2`.
    #[arg(long)]
    fock: Vec<String>,
    /// Final Γt of the time grid.
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy S and its rate R = dS/dΓt.
    Entropy {
        #[command(flatten)]
        common: Common,
        /// Add the master-equation oracle entropy as a column.
        #[arg(long)]
        oracle: bool,
    },
    /// q-variance (V, V1, V2) or energy variance.
    Variance {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "energy")]
        q: bool,
        #[arg(long)]
        energy: bool,
        /// Classical Fokker-Planck dynamics.
        #[arg(long)]
        classical: bool,
        /// Classical damping parameter, e.g. `2i` or `0.5`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<String>,
        /// Initial energy over k_B T for classical runs.
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
    },
    /// Phase table over N_β with critical values, as JSON.
    Phase {
        #[command(flatten)]
        common: Common,
    },
    /// Photon-number distribution P(n, t).
    Photon {
        #[command(flatten)]
        common: Common,
        /// Photon numbers to print (default 0..=40).
        #[arg(long = "n", value_delimiter = ',')]
        numbers: Vec<u32>,
    },
    /// Coarse-grained classical entropy S_c and its rate.
    ClassicalEntropy {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<String>,
    },
    /// Compare closed forms with the brute-force oracles; nonzero exit on failure.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "all")]
        set: VerifySet,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<String>,
    },
}

fn from_common(command: CommandKind, common: Common) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(command);
    if let Some(w) = common.omega {
        cfg.omega = w;
    }
    if let Some(g) = common.gamma {
        cfg.gamma = g;
    }
    cfg.gamma_ratio = common.gamma_ratio;
    cfg.n_beta = common.n_beta;
    cfg.temperature = common.temperature;
    for g in &common.gaussian {
        cfg.states.push(StateSpec::parse_gaussian(g)?);
    }
    for f in &common.fock {
        cfg.states.push(StateSpec::parse_fock(f)?);
    }
    cfg.grid = GridSpec {
        t_max: common.t_max,
        points: common.points,
    };
    Ok(cfg)
}

fn build_config(cli: Cli) -> Result<RunConfig> {
    let mut cfg = match (cli.config, cli.command) {
        (Some(_), Some(_)) => bail!("give either --config or a subcommand, not both"),
        (None, None) => bail!("a subcommand or --config is required (see --help)"),
        (Some(path), None) => RunConfig::from_file(&path)?,
        (None, Some(command)) => match command {
            Command::Entropy { common, oracle } => {
                let mut cfg = from_common(CommandKind::Entropy, common)?;
                cfg.oracle = oracle;
                cfg
            }
            Command::Variance {
                common,
                q,
                energy,
                classical,
                alpha,
                lambda,
            } => {
                let mut cfg = from_common(CommandKind::Variance, common)?;
                cfg.variance = match (q, energy) {
                    (true, _) => Some(VarianceKind::Q),
                    (_, true) => Some(VarianceKind::Energy),
                    _ => None,
                };
                cfg.classical = classical;
                cfg.alpha = alpha;
                cfg.lambda = lambda;
                cfg
            }
            Command::Phase { common } => from_common(CommandKind::Phase, common)?,
            Command::Photon { common, numbers } => {
                let mut cfg = from_common(CommandKind::Photon, common)?;
                cfg.photon_numbers = numbers;
                cfg
            }
            Command::ClassicalEntropy { common, alpha } => {
                let mut cfg = from_common(CommandKind::ClassicalEntropy, common)?;
                cfg.alpha = alpha;
                cfg
            }
            Command::Verify { common, set, alpha } => {
                let mut cfg = from_common(CommandKind::Verify, common)?;
                cfg.verify_set = Some(set);
                cfg.alpha = alpha;
                cfg
            }
        },
    };
    if cli.out.is_some() {
        cfg.out = cli.out;
    }
    if cli.truncation.is_some() {
        cfg.truncation = cli.truncation;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    let cfg = build_config(Cli::parse())?;
    let report = commands::run(&cfg)?;
    let text = report.output.render();
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if !report.pass {
        eprintln!("verification failed");
    }
    Ok(report.pass)
}
