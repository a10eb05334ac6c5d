//! `kdvb`: amalgam norms, KdV-Burgers second iterates and the ill-posedness witness.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 failed check.

mod commands;
mod config;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{load, PartitionConfig};
use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "kdvb",
    version,
    about = "Fourier amalgam norms and KdV-Burgers second-iterate witness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Cross-check the closed form against time quadrature (`iterate`).
    #[arg(long, global = true)]
    oracle: bool,

    /// Gauss-Legendre panels per unit length; overrides the config.
    #[arg(long, global = true)]
    quad_density: Option<usize>,

    /// Worker threads for independent cells.
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Norms of a spectrum.
    Norm,
    /// Second Picard iterate sampled on a grid.
    Iterate,
    #[command(subcommand)]
    Witness(WitnessCommand),
    #[command(subcommand)]
    Partition(PartitionCommand),
}

#[derive(Debug, Subcommand)]
enum WitnessCommand {
    /// Report every (N, t) cell without a verdict.
    Scan,
    /// Report and decide; exits 2 if the witness fails.
    Verify,
}

#[derive(Debug, Subcommand)]
enum PartitionCommand {
    /// Check that the smooth windows sum to one.
    Check,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
}

impl CliError {
    pub fn config(field: &str, err: kdvb_core::Error) -> Self {
        CliError::Usage(format!("{field}: {err}"))
    }
}

fn need_config(path: &Option<PathBuf>) -> Result<&Path, CliError> {
    path.as_deref()
        .ok_or_else(|| CliError::Usage("--config <path> is required for this command".into()))
}

fn run(cli: &Cli) -> Result<commands::Run, CliError> {
    match &cli.command {
        Command::Norm => commands::norm(&load(need_config(&cli.config)?)?, cli.quad_density),
        Command::Iterate => commands::iterate(&load(need_config(&cli.config)?)?, cli.quad_density, cli.oracle),
        Command::Witness(w) => commands::witness(
            &load(need_config(&cli.config)?)?,
            cli.quad_density,
            matches!(w, WitnessCommand::Verify),
        ),
        Command::Partition(PartitionCommand::Check) => {
            let cfg = match &cli.config {
                Some(path) => load(path)?,
                None => PartitionConfig::default(),
            };
            commands::partition_check(&cfg)
        }
    }
}

fn write_report(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if cli.parallel == 0 {
        eprintln!("error: --parallel must be at least 1");
        return ExitCode::from(1);
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.parallel).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    };
    let outcome = pool.install(|| run(&cli));
    let run = match outcome {
        Ok(run) => run,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = write_report(&run.table.render(cli.format), cli.out.as_deref()) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(1);
    }
    match run.failure {
        None => ExitCode::SUCCESS,
        Some(msg) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(2)
        }
    }
}
