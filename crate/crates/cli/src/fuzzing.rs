//! Entry points shared by the fuzz targets and the corpus replay test. None of
//! them runs a computation; they parse and validate only.

use clap::Parser;

use crate::args::Cli;
use crate::commands::{validate, COMMANDS};
use crate::config::{merge, parse_document, take_command};
use crate::range::parse_range;

/// Config document against every subcommand's schema.
pub fn config_json(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = parse_document(text) else { return };
    for name in COMMANDS {
        let mut m = file.clone();
        if take_command(&mut m, name).is_err() {
            continue;
        }
        if let Ok(defaults) = crate::commands::defaults(name) {
            let _ = validate(name, &merge(&[&defaults, &m]));
        }
    }
}

/// Whitespace-separated argument vector. `--config` is dropped so no file is read.
pub fn cli_args(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut argv = vec!["dipolatt".to_string()];
    argv.extend(text.split_whitespace().map(str::to_string));
    if argv.iter().any(|a| a.starts_with("--config")) {
        return;
    }
    if let Ok(cli) = Cli::try_parse_from(&argv) {
        let _ = crate::resolve(&cli.command);
    }
}

pub fn sweep_range(data: &[u8]) {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(grid) = parse_range(text) {
            assert!(!grid.is_empty() && grid.iter().all(|x| x.is_finite()));
        }
    }
}
