//! `splitaudit` — audit interaction logs and evaluation splits.
//!
//! Exit codes: 0 success, 1 error, 2 an alert was raised under `--fail-on-alert`.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()))
        .with_writer(std::io::stderr)
        .init();

    let result = match cli.command {
        Command::Stats(a) => commands::stats(a),
        Command::Split(a) => commands::split(a),
        Command::Audit(a) => commands::audit(a),
        Command::Compare(a) => commands::compare(a),
        Command::Serve(a) => commands::serve(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
