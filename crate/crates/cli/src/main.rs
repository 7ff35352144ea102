#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(a < b)` also rejects NaN.

mod args;
mod commands;
mod error;
mod inputs;
mod manifest;
mod output;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("toplag: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}
