//! Command-line front end: configuration, the verify/constants/curve/simulate
//! commands and their CSV/JSON outputs.

pub mod commands;
pub mod config;
pub mod output;

use std::path::Path;

pub use commands::Outcome;
pub use config::{ConfigError, Overrides, RunConfig};

/// Writes each (name, contents) pair into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, files: &[(String, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, contents) in files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}
