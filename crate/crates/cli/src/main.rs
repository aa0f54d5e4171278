//! `oqs`: command-line front end for `oqs-core`.
//!
//! Exit codes: 0 on success, 2 when a mathematical check fails, 1 for
//! usage, I/O and format errors.

mod channel;
mod gksl;
mod jc;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oqs_core::Error;

#[derive(Debug, Parser)]
#[command(name = "oqs", version, about = "Open quantum systems toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dissipative Jaynes-Cummings model.
    #[command(subcommand)]
    Jc(jc::JcCommand),
    /// Quantum channels: CPTP checks, Kraus form, dilation, PPT test.
    #[command(subcommand)]
    Channel(channel::ChannelCommand),
    /// GKSL generators: decomposition and evolution.
    #[command(subcommand)]
    Gksl(gksl::GkslCommand),
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable files, malformed JSON.
    Usage(String),
    /// A check ran and found a violation. The report, if any, was already written.
    Violation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Violation(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Hermiticity { .. }
            | Error::Trace { .. }
            | Error::NotPositive { .. }
            | Error::Completeness { .. }
            | Error::CompletePositivity { .. }
            | Error::NotTracePreserving { .. }
            | Error::NotHermiticityPreserving { .. }
            | Error::NotCompletelyPositiveGenerator { .. }
            | Error::Isometry { .. }
            | Error::AmplitudeZero { .. } => Self::Violation(msg),
            _ => Self::Usage(msg),
        }
    }
}

pub type CmdResult = Result<(), Failure>;

/// Reads and parses a JSON input file.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        // validation inside Deserialize impls surfaces as a custom serde error
        Failure::Usage(format!("{}: {e}", path.display()))
    })
}

/// Writes `text` to `out`, or to stdout when `out` is `None`.
pub fn emit(out: Option<&PathBuf>, text: &str) -> CmdResult {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

/// JSON with fixed float formatting and a trailing newline.
pub fn json_line(value: &serde_json::Value) -> String {
    let mut s = oqs_core::io::to_json_string(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Jc(c) => jc::run(c),
        Command::Channel(c) => channel::run(c),
        Command::Gksl(c) => gksl::run(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Violation(m) => eprintln!("violation: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
