use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flagcurve_core::FlagError;

mod commands;
mod config;
mod render;
mod report;

#[derive(Parser)]
#[command(name = "flagcurve", version, about = "Limit curves and invariant domains of flag representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the limit curve; write CSV, a summary and an SVG plot.
    LimitCurve(Args),
    /// Stable-norm estimate, saddle criterion verdict and contraction rates.
    Certify(Args),
    /// Fit the height function of the curve over L0 and its cocycle.
    Delta(Args),
    /// Recurrence of a base flag under the ball.
    Orbit(Args),
    /// Modulus-of-continuity diagnostics for the point curve.
    Regularity(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Flag(#[from] FlagError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn field(field: &str, msg: impl Display) -> Self {
        CliError::Config(format!("field `{field}`: {msg}"))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Flag(FlagError::InsufficientSamples { .. }) => 3,
            CliError::Flag(_) | CliError::Io(_) => 6,
        }
    }
}

/// Outcome of a command that ran to completion.
pub enum Outcome {
    Ok,
    Refuted,
    Inconclusive,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = match cli.command {
        Command::LimitCurve(a) => ("limit-curve", a),
        Command::Certify(a) => ("certify", a),
        Command::Delta(a) => ("delta", a),
        Command::Orbit(a) => ("orbit", a),
        Command::Regularity(a) => ("regularity", a),
    };
    let result = config::load(&args.config).and_then(|loaded| {
        let out = args
            .out
            .clone()
            .or_else(|| loaded.config.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("flagcurve-out"));
        std::fs::create_dir_all(&out)?;
        let outcome = commands::run(name, &loaded, &out)?;
        let note = match outcome {
            Outcome::Ok => "",
            Outcome::Refuted => " (refuted)",
            Outcome::Inconclusive => " (inconclusive)",
        };
        println!("flagcurve {name}: outputs in {}{note}", out.display());
        Ok(outcome)
    });
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Refuted) => ExitCode::from(4),
        Ok(Outcome::Inconclusive) => ExitCode::from(5),
        Err(e) => {
            eprintln!("flagcurve {name}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
