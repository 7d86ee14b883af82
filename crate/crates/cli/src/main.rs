//! `spclust`: batch driver for super-paramagnetic clustering.

mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    /// Inconsistent flags or inputs the parser cannot catch.
    Usage(String),
    Run(spclust::Error),
}

impl From<spclust::Error> for Failure {
    fn from(e: spclust::Error) -> Self {
        Failure::Run(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error: cannot configure {} threads: {e}", cli.threads);
            return ExitCode::from(1);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        // Output closed early by a pager or `head`.
        Err(Failure::Run(spclust::Error::Io(msg))) if msg.starts_with("Broken pipe") => {
            ExitCode::SUCCESS
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
