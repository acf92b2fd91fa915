//! Subcommands of the `chromaword` binary.
//!
//! Each subcommand reads its inputs, writes every output atomically and
//! leaves a `<out>.manifest.json` run record next to its primary output.

pub mod args;
mod commands;
pub mod error;
pub mod output;

use std::path::PathBuf;

pub use args::{Cli, Command};
pub use error::{exit, CliError, CliResult};
pub use output::RunManifest;

/// Runs one subcommand and returns the manifest path.
pub fn run(command: &Command) -> CliResult<PathBuf> {
    let command = command.resolved();
    let mut manifest = RunManifest::new(command.name(), &command, None);
    let primary = match &command {
        Command::Extract(a) => {
            commands::extract(a, &mut manifest)?;
            &a.out
        }
        Command::Histogram(a) => {
            commands::histogram(a, &mut manifest)?;
            &a.out
        }
        Command::Train(a) => {
            commands::train(a, &mut manifest)?;
            &a.out
        }
        Command::Evaluate(a) => {
            commands::evaluate(a, &mut manifest)?;
            &a.out
        }
    };
    manifest.write(primary)
}
