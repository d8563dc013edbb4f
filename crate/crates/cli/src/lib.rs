//! Batch driver: one TOML configuration in, one CSV or JSON artifact out.

pub mod config;
pub mod error;
pub mod run;

pub use config::{Command, RunConfig};
pub use error::CliError;
pub use run::{execute, run, Outcome, Overrides};
