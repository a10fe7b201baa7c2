use std::process::ExitCode;

use clap::Parser;
use xncut_cli::Cli;

fn main() -> ExitCode {
    match xncut_cli::run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
