//! `apw`: command-line front end for the APW and certificate tools.
//!
//! Energies are in units with `ħ²/2m = 1`, so the Hamiltonian is `-Δ + V`.
//! Lengths may be written as `pi`, `2*pi`, `pi/2` and similar, both on the
//! command line and in config files.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::WellArgs;
use config::parse_real;

#[derive(Debug)]
pub enum CliError {
    /// Missing or malformed config, bad flag values.
    Config(String),
    /// Output could not be written.
    Io(String),
    Core(apw_core::Error),
}

impl From<apw_core::Error> for CliError {
    fn from(e: apw_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Core(_) => 2,
        }
    }

    fn report(&self) -> String {
        match self {
            CliError::Config(m) => format!("error[config]: {m}"),
            CliError::Io(m) => format!("error[io]: {m}"),
            CliError::Core(e) => format!("error[{}]: {e}", e.identity()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "apw",
    version,
    about = "APW secular equations and eigenvalue certificates"
)]
#[command(after_help = "Set APW_NUM_THREADS to limit the worker threads.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct WellFlags {
    /// Well depth V0 (the potential is -V0 inside).
    #[arg(long, value_parser = parse_real)]
    v0: Option<f64>,
    /// Well radius.
    #[arg(long, value_parser = parse_real)]
    a: Option<f64>,
    /// Bisection width for the eigenvalue.
    #[arg(long, value_parser = parse_real)]
    tol: Option<f64>,
    /// JSON config with any of v0, a, tol, gammas, output, plot_output.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl WellFlags {
    fn args(&self) -> WellArgs {
        WellArgs {
            v0: self.v0,
            a: self.a,
            tol: self.tol,
            config: self.config.clone(),
        }
    }
}

#[derive(Args)]
struct ConfigFlag {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// s-wave bound state of the spherical well: E1 and the amplitudes A, C.
    SolveWell {
        #[command(flatten)]
        well: WellFlags,
        #[arg(long)]
        json: bool,
    },
    /// Broken-form energies of discontinuous trial functions for the well.
    SweepWell {
        #[command(flatten)]
        well: WellFlags,
        /// Comma-separated jump amplitudes; defaults to 0, 0.01, ..., 0.3.
        #[arg(long, value_delimiter = ',', value_parser = parse_real)]
        gammas: Option<Vec<f64>>,
        /// CSV output (stdout if absent).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Companion CSV of (gamma, tilde_E1) pairs.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Secular roots of an APW basis at a list of k-points.
    ApwBands(ConfigFlag),
    /// Lowest secular root, jump norm and certificate against l_max.
    ApwConvergence(ConfigFlag),
    /// Jump-penalty certificates and empirical bound checks.
    Certify(ConfigFlag),
    /// Schmidt orthonormalization of a Gram matrix with its deviation bound.
    Orthonormalize(ConfigFlag),
    /// Dirichlet and Neumann Ritz values on (0, pi) and the constant trial.
    IntervalDemo {
        #[arg(long)]
        json: bool,
    },
    /// Boundary Sobolev norms, extension constants, layered decomposition.
    NormTools(ConfigFlag),
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("APW_NUM_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "APW_NUM_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::SolveWell { well, json } => commands::solve_well(&well.args(), json),
        Command::SweepWell {
            well,
            gammas,
            output,
            plot,
        } => commands::sweep_well(&well.args(), gammas, output, plot),
        Command::ApwBands(c) => commands::apw_bands(&c.config),
        Command::ApwConvergence(c) => commands::apw_convergence(&c.config),
        Command::Certify(c) => commands::certify(&c.config),
        Command::Orthonormalize(c) => commands::orthonormalize(&c.config),
        Command::IntervalDemo { json } => commands::interval_demo(json),
        Command::NormTools(c) => commands::norm_tools(&c.config),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code())
        }
    }
}
