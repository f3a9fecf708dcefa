//! Command-line pipeline: ingest → mine-rules → strikingness →
//! predict-recurrency → evaluate → ensemble → report.
//!
//! Every run writes a manifest next to its primary output recording the
//! resolved configuration, input digests, tool version, and duration.
//! Exit codes: 0 success, 1 validation/config error, 2 I/O error.

pub mod args;
mod commands;
mod config;
mod manifest;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
pub use manifest::RunManifest;

/// Parse `argv` and execute. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Ingest(args) => commands::ingest::run(args),
        Command::MineRules(args) => commands::mine::run(args),
        Command::Strikingness(args) => commands::strikingness::run(args),
        Command::PredictRecurrency(args) => commands::recurrency::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Ensemble(args) => commands::ensemble::run(args),
        Command::Report(args) => commands::report::run(args),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                strikebench::Error::Io(_) => 2,
                _ => 1,
            }
        }
    }
}
