//! JSON file formats, run configs and reports on top of `sdlab-core`, and
//! the commands behind the `sdlab` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

pub use commands::{run, Outcome, EXIT_CONFIG, EXIT_OK, EXIT_VIOLATION};
pub use config::RunConfig;
pub use error::{CliError, Result};
