//! Command-line frontend.

pub mod args;
pub mod commands;
pub mod output;
pub mod spec;

use clap::Parser;

pub use args::{Cli, Command, Format};
pub use spec::RunSpec;

use crate::error::{Error, Result};

/// Runs a resolved specification on a pool of `spec.workers` threads.
pub fn execute(spec: &RunSpec) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match spec.command {
        Command::Timeseries => commands::run_timeseries(spec),
        Command::Surface => commands::run_surface(spec),
        Command::Equilibrium => commands::run_equilibrium(spec),
        Command::OracleCompare => commands::run_oracle_compare(spec),
    })
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match RunSpec::resolve(cli).and_then(|spec| execute(&spec)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
