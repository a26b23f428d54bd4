mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blowup::stochastic::NormalConvention;

/// Explosion-time analysis for noisy integral equations.
#[derive(Parser)]
#[command(name = "blowup", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scenario configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports and CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the Φ convention (centered|cdf).
    #[arg(long, value_parser = parse_convention)]
    convention: Option<NormalConvention>,
    /// Override the quantile used for the maintenance time.
    #[arg(long)]
    quantile: Option<f64>,
}

fn parse_convention(s: &str) -> Result<NormalConvention, String> {
    match s {
        "centered" => Ok(NormalConvention::Centered),
        "cdf" => Ok(NormalConvention::Cdf),
        other => Err(format!("unknown convention '{other}': expected centered|cdf")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Explosion dichotomy and exact explosion time of the noiseless test.
    Osgood(CommonArgs),
    /// Deterministic two-sided explosion-time bounds.
    Bounds(CommonArgs),
    /// Numeric trajectories; with Brownian noise, Monte Carlo distribution
    /// estimates and bound curves.
    Simulate(CommonArgs),
    /// Crack-growth scenario: power-law drift, constant intensity,
    /// maintenance quantile and bound comparison curves.
    Paris(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Osgood(args) => commands::run(args, commands::Kind::Osgood),
        Command::Bounds(args) => commands::run(args, commands::Kind::Bounds),
        Command::Simulate(args) => commands::run(args, commands::Kind::Simulate),
        Command::Paris(args) => commands::run(args, commands::Kind::Paris),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(err.exit_code())
        }
    }
}
