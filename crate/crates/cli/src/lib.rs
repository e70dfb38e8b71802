//! Experiment runner behind the `ecsim` binary: argument and config-file
//! handling, the experiment subcommands, and table serialization.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parse;

use std::fs::File;
use std::io::{self, BufWriter, Write};

pub use commands::{run, CommandOutput};
pub use config::{parse_with_config, Cli, CliParseError, Format, RunConfig};
pub use error::{CliError, Result};

/// Runs one invocation and writes its table; returns the process exit code.
pub fn execute(config: &RunConfig) -> Result<i32> {
    let out = run(config)?;
    match &config.cli.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            output::write_table(&out.table, config.cli.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            output::write_table(&out.table, config.cli.format, stdout.lock())?;
        }
    }
    if out.failures.is_empty() {
        Ok(0)
    } else {
        for f in &out.failures {
            eprintln!("ecsim: {f}");
        }
        Err(CliError::Tolerance(format!(
            "{} check(s) failed",
            out.failures.len()
        )))
    }
}
