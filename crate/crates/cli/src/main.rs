// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(gapdeph::Error),
    #[error("output error: {0}")]
    Io(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl From<gapdeph::Error> for CliError {
    fn from(e: gapdeph::Error) -> Self {
        use gapdeph::Error as E;
        match e {
            E::InvalidParameter { .. } | E::Domain(_) => CliError::Config(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "gapdeph", version, about = "Bath energy and information flow in gapped dephasing channels")]
struct Cli {
    /// TOML run configuration.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set model.alpha=0.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory; same as `--set output.dir=...`.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Phase limits and the energy/information correspondence verdict.
    Limits,
    /// Time series of the bath energy, its rate, the dephasing rate and factor, and the coherence.
    Simulate,
    /// Predicted oscillation windows, detected sign intervals and their conformance.
    Intervals,
    /// The non-Markovianity measure up to the configured horizon.
    Measure {
        /// Use the built-in rate `sin t` with factor `1 - cos t` on `[0, 2π]`.
        #[arg(long)]
        synthetic: bool,
    },
    /// Limits and verdicts over the `[sweep]` grid.
    Sweep,
    /// Run the acceptance checks.
    Verify {
        /// Run only this criterion (1-10).
        #[arg(long)]
        criterion: Option<u8>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Limits => "limits",
            Command::Simulate => "simulate",
            Command::Intervals => "intervals",
            Command::Measure { .. } => "measure",
            Command::Sweep => "sweep",
            Command::Verify { .. } => "verify",
        }
    }

    /// Commands that can run without a model.
    fn config_optional(&self) -> bool {
        matches!(self, Command::Verify { .. } | Command::Measure { synthetic: true })
    }
}

fn load_config(cli: &Cli) -> Result<Option<RunConfig>, CliError> {
    let mut overrides = cli.overrides.clone();
    if let Some(out) = &cli.out {
        let dir = toml::Value::String(out.display().to_string());
        overrides.push(format!("output.dir={dir}"));
    }
    if cli.config.is_none() && cli.overrides.is_empty() {
        if cli.command.config_optional() {
            return Ok(None);
        }
        return Err(CliError::Config(format!("`{}` needs --config", cli.command.name())));
    }
    RunConfig::load(cli.config.as_deref(), &overrides).map(Some)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli)?;
    let out_dir = cfg
        .as_ref()
        .map(|c| c.output.dir.clone())
        .or_else(|| cli.out.clone())
        .unwrap_or_else(|| PathBuf::from("gapdeph-out"));
    match cli.command {
        Command::Limits => commands::limits(&cfg.expect("loaded")),
        Command::Simulate => commands::simulate(&cfg.expect("loaded")),
        Command::Intervals => commands::intervals(&cfg.expect("loaded")),
        Command::Measure { synthetic } => commands::measure(cfg.as_ref(), synthetic, &out_dir),
        Command::Sweep => commands::sweep(&cfg.expect("loaded")),
        Command::Verify { criterion } => commands::verify(cfg.as_ref(), criterion, &out_dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gapdeph: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Verification("1".into()).exit_code(), 4);
        let e: CliError = gapdeph::Error::NonConvergence {
            quantity: "q".into(),
            value: 0.0,
            abs_err: 1.0,
        }
        .into();
        assert_eq!(e.exit_code(), 3);
        let e: CliError = gapdeph::Error::Domain("t < 0".into()).into();
        assert_eq!(e.exit_code(), 2);
    }
}
