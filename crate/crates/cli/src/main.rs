use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use rislink_cli::config::Cli;
use rislink_cli::{run, workers_from_env};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match workers_from_env() {
        Ok(workers) => run(&cli, workers),
        Err(e) => {
            eprintln!("rislink: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(outcome.stdout.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(3);
    }
    match outcome.status {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rislink: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
