use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod commands;
mod output;

use args::Cli;

/// Exit status for a well-formed command that failed validation.
const EXIT_INVALID: u8 = 2;
/// Exit status for a refused enumeration or nested evaluation.
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            let rendered = err.render().to_string();
            let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("rove-cover: {}", line.trim());
            return ExitCode::from(EXIT_INVALID);
        }
    };

    match commands::run(&cli) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("rove-cover: {err}");
            ExitCode::from(if err.is_budget() { EXIT_BUDGET } else { EXIT_INVALID })
        }
    }
}
