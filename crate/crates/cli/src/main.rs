//! Command-line front end: `hyperscheme <subcommand>`.
//!
//! Exit status is 0 when every check passes, 1 when an axiom or check fails,
//! and 2 on usage, input or I/O errors.

mod args;
mod commands;
mod load;
mod report;

use std::io::Write as _;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::Cli;
use hyperscheme::Error;
use report::{Report, Status};

/// Library errors that mean "the input fails a mathematical check" rather
/// than "the input could not be used".
fn as_failed_check(e: &Error) -> Option<Report> {
    let kind = match e {
        Error::Axiom(v) => return Some(Report::new(Status::Fail, json!({ "violation": commands::violation(v) }))),
        Error::NotAGroup(_) => "not_a_group",
        Error::NotASubgroup(_) => "not_a_subgroup",
        Error::NotUnimodular { .. } => "not_unimodular",
        Error::NotCommutative => "not_commutative",
        Error::DegenerateSpectrum { .. } => "degenerate_spectrum",
        Error::NotASemicharacter { .. } => "not_a_semicharacter",
        _ => return None,
    };
    Some(Report::new(Status::Fail, json!({ "error": kind, "message": e.to_string() })))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match commands::run(&cli.command, &cli.global) {
        Ok(r) => r,
        Err(e) => match e.downcast_ref::<Error>().and_then(as_failed_check) {
            Some(r) => r,
            None => {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        },
    };
    let text = if cli.global.json { report.to_json() + "\n" } else { report.to_human() };
    // A closed pipe (`| head`) is not an error worth a panic.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
