use std::process::ExitCode;

use clap::Parser;
use navsim_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match navsim_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
