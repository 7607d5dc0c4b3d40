//! `molga` command-line harness.
//!
//! Exit codes: 0 success, 2 config error, 3 reference parse failure,
//! 4 oracle failure, 1 anything else.

mod manifest;
mod modes;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = manifest::Cli::parse();
    let run = manifest::resolve(&cli).and_then(|m| modes::run(&m));
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("molga: {err}");
            ExitCode::from(err.code())
        }
    }
}
