//! `qpg`: batch front end for simulation, mode analysis, profile fitting,
//! efficiency and literature benchmarks. Every run writes its outputs, a
//! config echo and a `manifest.json` into `--out`.

mod commands;
mod manifest;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use thiserror::Error;

pub const CONFIG_DIR_ENV: &str = "QPG_CONFIG_DIR";
pub const DEFAULT_CONFIG_NAME: &str = "qpg.toml";

#[derive(Debug, Parser)]
#[command(name = "qpg", version, about = "Quantum pulse gate waveguide modelling")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Phase-matching spectrum of an ideal or inhomogeneous device.
    SimulatePm(commands::SimulatePmArgs),
    /// Joint spectral amplitude with its Schmidt decomposition and mode report.
    Jsa(commands::JsaArgs),
    /// Schmidt decomposition of a configured or supplied JSA.
    Schmidt(commands::SchmidtArgs),
    /// Fit a piecewise Δβ profile to a measured phase-matching spectrum.
    FitProfile(commands::FitArgs),
    /// Conversion-efficiency curve and η_norm fit to depletion data.
    Efficiency(commands::EfficiencyArgs),
    /// Length sweep, efficiency curves and the literature comparison report.
    Bench(commands::BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Experiment TOML. Relative paths that do not exist are looked up in
    /// $QPG_CONFIG_DIR; without this flag $QPG_CONFIG_DIR/qpg.toml is used.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long, default_value = "qpg-out")]
    pub out: PathBuf,
    /// Also write SVG previews next to the data files.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: qpg_core::Error },
    #[error(transparent)]
    Core(#[from] qpg_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } => 2,
            CliError::Core(e) if e.is_input_error() => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SimulatePm(a) => commands::simulate_pm(&a),
        Command::Jsa(a) => commands::jsa(&a),
        Command::Schmidt(a) => commands::schmidt(&a),
        Command::FitProfile(a) => commands::fit_profile(&a),
        Command::Efficiency(a) => commands::efficiency(&a),
        Command::Bench(a) => commands::bench(&a),
    };
    match result {
        Ok(out) => {
            println!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            ExitCode::from(e.exit_code())
        }
    }
}
