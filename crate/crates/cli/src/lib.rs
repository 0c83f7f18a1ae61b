//! Batch driver for the `spectral-taylor` library: loads a JSON experiment
//! config, runs expansions, verification and bound suites, and writes CSV
//! reports atomically into an output directory.

pub mod commands;
pub mod config;
mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use spectral_taylor::spectral_action::Route;

pub use error::{CliError, Result};

use config::ExperimentConfig;

#[derive(Debug, Parser)]
#[command(name = "spectral-taylor", version, about = "Taylor expansion of tr f(D + A) by divided differences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand tr f(D + A) to order n_max and study the remainder.
    Expand(RunArgs),
    /// Run the cross-verification suites.
    Verify(RunArgs),
    /// Run the simplex, Hölder and Getzler–Szenes inequality suites.
    Bounds(RunArgs),
    /// Time taylor_term over an (N, n) grid.
    Bench(RunArgs),
    /// Evaluate one divided difference of a Gaussian mixture.
    Divdiff(DivdiffArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `run.out`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replace every seed in the config.
    #[arg(long)]
    pub seed_override: Option<u64>,
    /// Taylor-term route; overrides `run.route`.
    #[arg(long)]
    pub route: Option<Route>,
}

#[derive(Debug, Args)]
pub struct DivdiffArgs {
    /// Comma-separated nodes.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub nodes: Vec<f64>,
    /// Gaussian atom `t:w` of f(x) = Σ w e^{-t x²}; repeatable.
    #[arg(long = "atom", value_parser = parse_atom)]
    pub atoms: Vec<(f64, f64)>,
}

fn parse_atom(s: &str) -> std::result::Result<(f64, f64), String> {
    let (t, w) = s.split_once(':').ok_or("expected t:w")?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x}: {e}"));
    Ok((parse(t)?, parse(w)?))
}

fn prepare(args: &RunArgs) -> Result<(ExperimentConfig, PathBuf)> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed_override {
        config.override_seeds(seed);
    }
    if let Some(route) = args.route {
        config.run.route = route;
    }
    let out = args.out.clone().unwrap_or_else(|| config.run.out.clone());
    Ok((config, out))
}

/// Executes one command and returns what it prints on success.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Expand(args) => {
            let (config, out) = prepare(args)?;
            Ok(commands::cmd_expand(&config, &out)?.summary())
        }
        Command::Verify(args) => {
            let (config, out) = prepare(args)?;
            let rows = commands::cmd_verify(&config, &out)?;
            Ok(format!("{} checks passed\n", rows.len()))
        }
        Command::Bounds(args) => {
            let (config, out) = prepare(args)?;
            let rows = commands::cmd_bounds(&config, &out)?;
            Ok(format!("{} bounds hold\n", rows.len()))
        }
        Command::Bench(args) => {
            let (config, out) = prepare(args)?;
            let rows = commands::cmd_bench(&config, &out)?;
            Ok(format!("{} timings written\n", rows.len()))
        }
        Command::Divdiff(args) => {
            let atoms = if args.atoms.is_empty() {
                vec![(1.0, 1.0)]
            } else {
                args.atoms.clone()
            };
            commands::cmd_divdiff(&args.nodes, &atoms)
        }
    }
}
