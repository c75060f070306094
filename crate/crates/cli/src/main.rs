//! `acfreq`: precision bounds and probe-state QFI for stochastic AC signals.
//!
//! Exit codes: 0 success, 1 tolerance or runtime failure, 2 usage error.

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Format, RunConfig, CONFIG_ENV};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

#[derive(Debug, Parser)]
#[command(name = "acfreq", version, about = "Quantum precision bounds for stochastic AC signal frequencies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key = value file; flags override its entries.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Environment bound for one parameter point.
    Bound,
    /// QFI of a Dicke-superposition or GHZ probe by every available route.
    ProbeQfi,
    /// Small-parameter summary table with asymptotic predictions.
    Table1,
    /// Probe QFI versus N for the single-frequency parameter.
    Fig2,
    /// Probe QFI versus N for the separation parameter.
    Fig3,
    /// Empirical versus analytic phase moments.
    Montecarlo,
    /// Closed-form pulse-sequence phase versus sign-toggled quadrature.
    PulseVerify,
    /// Optimal coherent-field bound.
    Coherent,
}

impl Command {
    fn default_format(self) -> Format {
        match self {
            Command::Table1 => Format::Json,
            _ => Format::Csv,
        }
    }
}

fn run(cli: Cli) -> Result<Option<String>, CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = cli.run.or(file);
    let outcome = match cli.command {
        Command::Bound => commands::bound(&cfg),
        Command::ProbeQfi => commands::probe_qfi(&cfg),
        Command::Table1 => commands::table1_cmd(&cfg),
        Command::Fig2 => commands::fig(&cfg, false),
        Command::Fig3 => commands::fig(&cfg, true),
        Command::Montecarlo => commands::montecarlo(&cfg),
        Command::PulseVerify => commands::pulse(&cfg),
        Command::Coherent => commands::coherent(&cfg),
    }?;
    let format = cfg.format.unwrap_or(cli.command.default_format());
    match &cfg.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| anyhow::anyhow!("cannot create {}: {e}", path.display()))?;
            let mut w = BufWriter::new(f);
            outcome.doc.write(format, &mut w)?;
            w.flush().map_err(anyhow::Error::from)?;
        }
        None => {
            let stdout = io::stdout();
            outcome.doc.write(format, stdout.lock())?;
        }
    }
    Ok(outcome.failure)
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
        || e.chain()
            .filter_map(|c| c.downcast_ref::<csv::Error>())
            .any(|c| matches!(c.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("acfreq: tolerance failure: {failure}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("acfreq: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(e)) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(CliError::Runtime(e)) => {
            eprintln!("acfreq: {e:#}");
            ExitCode::from(1)
        }
    }
}
