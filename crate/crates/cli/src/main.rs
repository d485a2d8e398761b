//! `lpmix`: file-based experiments on large periods, shadowing and measure approximation.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lpmix_core::{Error, Result};

use commands::{analyze, approx, lpp, perturb, shadow, Ctx};
use config::ConfigFile;
use output::Format;

#[derive(Parser)]
#[command(name = "lpmix", version, about)]
struct Cli {
    /// JSON config for the command.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory receiving `<command>.json` (and `<command>.csv`).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Recorded in every report; no command currently draws random numbers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// `csv` writes a plot-ready table next to the JSON report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Irreducibility, primitivity, class period, decomposition, entropy and periodic counts.
    Analyze {
        #[arg(long)]
        max_period: Option<usize>,
    },
    /// Certify or refute the large periods property.
    Lpp {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Build exact-period pseudo-orbits from homoclinic data and shadow them.
    PseudoShadow {
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        n_from: Option<usize>,
        #[arg(long)]
        n_to: Option<usize>,
    },
    /// Approximate a target measure by a periodic or a mixing Markov measure.
    ApproxMeasure {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_enum)]
        mode: Option<approx::Mode>,
    },
    /// Compare certificates of the horseshoe before and after perturbing its rates.
    PerturbSmoke {
        #[arg(long, allow_hyphen_values = true)]
        magnitude: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<i32> {
    let path = cli
        .config
        .ok_or_else(|| Error::InvalidInput("--config PATH is required".into()))?;
    let cfg = ConfigFile::read(&path)?;
    let ctx = Ctx {
        out: cli.out,
        format: cli.format,
        seed: cli.seed,
    };
    match cli.command {
        Command::Analyze { max_period } => analyze::run(&ctx, &cfg, max_period),
        Command::Lpp { epsilon, n_max } => lpp::run(&ctx, &cfg, &lpp::Overrides { epsilon, n_max }),
        Command::PseudoShadow { delta, n_from, n_to } => {
            shadow::run(&ctx, &cfg, &shadow::Overrides { delta, n_from, n_to })
        }
        Command::ApproxMeasure { epsilon, mode } => approx::run(&ctx, &cfg, &approx::Overrides { epsilon, mode }),
        Command::PerturbSmoke { magnitude, epsilon } => {
            perturb::run(&ctx, &cfg, &perturb::Overrides { magnitude, epsilon })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
