//! Command-line front end for the spin-1/2 relaxation engines.
//!
//! Exit codes: 0 pass, 2 tolerance breach, 3 config error, 4 numerical
//! failure. `SPINRELAX_WORKERS` caps the worker pool used by sweeps.

mod commands;
mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::ScenarioConfig;

#[derive(Debug)]
pub enum CliError {
    /// Exit 2: a verified tolerance or ordering was breached.
    Breach(String),
    /// Exit 3: configuration unreadable, invalid or out of range.
    Config(String),
    /// Exit 4: a numerical kernel failed.
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Breach(_) => 2,
            CliError::Config(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Breach(m) | CliError::Config(m) | CliError::Numerical(m) => m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Redfield,
    Master,
    Kraus,
}

#[derive(Parser)]
#[command(
    name = "spinrelax",
    about = "Dissipative dynamics of a frequency-modulated spin-1/2: \
             semiclassical, master-equation and operator-sum engines",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one scenario and emit the trajectory as CSV.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Engine::Redfield)]
        engine: Engine,
        /// Reject non-adiabatic modulation instead of proceeding.
        #[arg(long)]
        strict_adiabatic: bool,
    },
    /// Compare the three engines on one scenario; nonzero exit on breach.
    Equivalence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the decay curves over the configured parameter grid.
    ControlSweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Channel sanity checks: completeness, fixed point, composition.
    KrausVerify {
        #[arg(long)]
        config: PathBuf,
    },
}

fn init_worker_pool() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("SPINRELAX_WORKERS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Config(format!("SPINRELAX_WORKERS = {v:?} is not a number")))?;
        if n == 0 {
            return Err(CliError::Config("SPINRELAX_WORKERS must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    init_worker_pool()?;
    match cli.command {
        Command::Evolve {
            config,
            out,
            engine,
            strict_adiabatic,
        } => {
            let (cfg, bytes) = ScenarioConfig::load(&config)?;
            commands::evolve::run(&cfg, &bytes, engine, out.as_deref(), strict_adiabatic)
        }
        Command::Equivalence { config, out } => {
            let (cfg, bytes) = ScenarioConfig::load(&config)?;
            commands::equivalence::run(&cfg, &bytes, out.as_deref())
        }
        Command::ControlSweep { config, out } => {
            let (cfg, bytes) = ScenarioConfig::load(&config)?;
            commands::sweep::run(&cfg, &bytes, out.as_deref())
        }
        Command::KrausVerify { config } => {
            let (cfg, _) = ScenarioConfig::load(&config)?;
            commands::kraus_verify::run(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
