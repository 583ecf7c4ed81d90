// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;

use args::{Cli, Command, Format};
use clap::Parser;
use std::path::Path;
use std::process::ExitCode;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Usage(String),
    Schema(String),
    Convergence(String),
    Verification(String),
}

impl CliError {
    fn io(path: Option<&Path>, e: std::io::Error) -> Self {
        match path {
            Some(p) => CliError::Io(format!("{}: {e}", p.display())),
            None => CliError::Io(format!("stdout: {e}")),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Schema(_) => 3,
            CliError::Convergence(_) => 4,
            CliError::Verification(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Usage(m) => write!(f, "invalid argument: {m}"),
            CliError::Schema(m) => write!(f, "{m}"),
            CliError::Convergence(m) => write!(f, "convergence failure: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<twomode_core::Error> for CliError {
    fn from(e: twomode_core::Error) -> Self {
        use twomode_core::Error as E;
        match e {
            E::Schema(_) => CliError::Schema(e.to_string().trim_end().to_string()),
            E::Convergence { .. } | E::NonNormalizable { .. } => CliError::Convergence(e.to_string()),
            E::Capacity { .. } | E::Validation(_) | E::Domain { .. } => CliError::Usage(e.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let fmt = |default: Format| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Evaluate(a) => commands::evaluate(a, fmt(Format::Text)),
        Command::Bounds(a) => commands::bounds(a, fmt(Format::Csv)),
        Command::Minimize(a) => commands::minimize(a, fmt(Format::Csv)),
        Command::Sample(a) => commands::sample(a, fmt(Format::Csv)),
        Command::Fig1(a) => commands::fig1(a, fmt(Format::Csv)),
        Command::Fig2(a) => commands::fig2(a, fmt(Format::Csv)),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twomode: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
