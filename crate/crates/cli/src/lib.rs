//! Batch front-end for the `railconc` simulator.
//!
//! Every subcommand resolves a [`RunConfig`], builds one table and renders it
//! as CSV or JSON. Output depends only on the configuration and seed.

pub mod commands;
pub mod config;
pub mod table;

use std::io::Write;
use std::path::PathBuf;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{Format, Overrides, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_INVARIANT: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Protocol(#[from] railconc::protocols::ProtocolError),
    #[error(transparent)]
    Analytics(#[from] railconc::analytics::AnalyticsError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => EXIT_CONFIG,
            CliError::Invariant(_) | CliError::Protocol(_) | CliError::Analytics(_) => EXIT_INVARIANT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "railconc", version, about = "Single-rail entanglement concentration experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Heralded pair generation from two pair sources.
    Generate(CommonArgs),
    /// Degradation of an unbalanced pair under chained swaps.
    SwapChain(CommonArgs),
    /// Iterated concentration rounds with yield accounting.
    Concentrate(CommonArgs),
    /// Closed-form yield series against the exact oracle.
    Yield(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::SwapChain(_) => "swap-chain",
            Command::Concentrate(_) => "concentrate",
            Command::Yield(_) => "yield",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Generate(a) | Command::SwapChain(a) | Command::Concentrate(a) | Command::Yield(a) => a,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Flat TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Destination file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo trials; 0 disables sampling.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Comma-separated |α|² values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha_sq: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta_ab: Option<f64>,
    /// QND probe phase: "pi" or a number in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub qnd_theta: Option<String>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub swap_depth: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub p_a: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub p_b: Option<Vec<f64>>,
}

impl CommonArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            alpha_sq: self.alpha_sq.clone(),
            theta_ab: self.theta_ab,
            qnd_theta: self.qnd_theta.clone(),
            rounds: self.rounds,
            swap_depth: self.swap_depth,
            p_a: self.p_a.clone(),
            p_b: self.p_b.clone(),
            trials: self.trials,
            seed: self.seed,
            format: self.format,
            output: self.output.clone(),
        }
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        RunConfig::resolve(self.config.as_deref(), self.overrides())
    }
}

/// Rendered output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub text: String,
    /// Closed-form checks that did not pass.
    pub failed_checks: Vec<String>,
}

/// Runs `command` (by subcommand name) against a resolved configuration.
pub fn render(command: &str, cfg: &RunConfig) -> Result<Rendered, CliError> {
    let outcome = match command {
        "generate" => commands::generate(cfg)?,
        "swap-chain" => commands::swap_chain_table(cfg)?,
        "concentrate" => commands::concentrate(cfg)?,
        "yield" => commands::yield_table(cfg)?,
        other => return Err(CliError::Config(format!("unknown command {other:?}"))),
    };
    let text = match cfg.format {
        Format::Csv => outcome.table.to_csv()?,
        Format::Json => outcome.table.to_json(commands::config_value(command, cfg)?)?,
    };
    Ok(Rendered { text, failed_checks: outcome.failed_checks })
}

/// Executes a parsed invocation and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let name = cli.command.name();
    let result = cli.command.args().resolve().and_then(|cfg| {
        let rendered = render(name, &cfg)?;
        match &cfg.output {
            Some(path) => std::fs::write(path, &rendered.text)?,
            None => std::io::stdout().lock().write_all(rendered.text.as_bytes())?,
        }
        Ok(rendered.failed_checks)
    });
    match result {
        Ok(failed) if failed.is_empty() => EXIT_OK,
        Ok(failed) => {
            for f in &failed {
                eprintln!("error: closed-form check failed: {f}");
            }
            EXIT_INVARIANT
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
