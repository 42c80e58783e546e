//! `millionaire`: run, verify and measure the comparison protocols.
//!
//! Exit status: 0 for GT or PASS, 1 for LT or FAIL, 2 for EQ, 3 for errors.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::EXIT_ERROR)
        }
    }
}
