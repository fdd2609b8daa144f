//! Command-line front end: tables, generate, fit, validate, plotdata.
//!
//! Exit codes: 0 success, 1 usage or invalid input, 2 I/O failure,
//! 3 validation-suite failure.

use std::ffi::OsString;

use clap::Parser;

pub mod analysis;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;

use cli::{Cli, Command};
use config::{load_registry, FileConfig};
use error::{CliError, CliResult};

fn execute(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let override_path = cli.table_override.clone().or_else(|| file.table_override.clone());
    let registry = load_registry(override_path.as_deref())?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers.or(file.workers) {
        if w == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Tables(args) => commands::tables::run(&args, &file, &registry),
        Command::Generate(args) => commands::generate::run(&args, &file, &registry),
        Command::Fit(args) => commands::fit::run(&args, &file),
        Command::Validate(args) => commands::validate::run(&args, &file, &registry),
        Command::Plotdata(args) => commands::plotdata::run(&args, &file),
    })
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("inh-fr3: {e}");
            e.exit_code()
        }
    }
}
