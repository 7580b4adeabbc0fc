//! Batch front end for the dipolatt library.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod fuzzing;
pub mod output;
pub mod range;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde_json::Value;

pub use args::{Cli, Command, Format};
pub use error::{CliError, Result};
pub use output::Output;

use config::{merge, parse_document, take_command, Params};

/// Merge defaults, the config file and command-line flags, then type-check.
pub fn resolve(command: &Command) -> Result<Params> {
    let name = command.name();
    let file = match &command.common().config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            let mut m = parse_document(&text)?;
            take_command(&mut m, name)?;
            m
        }
        None => Params::new(),
    };
    let merged = merge(&[&commands::defaults(name)?, &file, &command.overrides()]);
    commands::validate(name, &merged)?;
    Ok(merged)
}

pub fn execute(name: &str, params: &Params, workers: Option<usize>) -> Result<Output> {
    let pool = match workers {
        Some(0) => return Err(CliError::Validation("--workers must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| commands::rows(name, params))?;
    output::check_finite(&rows)?;
    let mut config = Params::new();
    config.insert("command".into(), Value::String(name.into()));
    config.extend(params.clone());
    Ok(Output { config, version: output::version(), rows })
}

pub fn run(cli: &Cli) -> Result<()> {
    let params = resolve(&cli.command)?;
    let common = cli.command.common();
    let out = execute(cli.command.name(), &params, common.workers)?;
    let text = output::render(&out, common.format)?;
    match &common.out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn run_from<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
        Ok(cli) => match run(&cli) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("dipolatt: {e}");
                e.exit_code()
            }
        },
    }
}
