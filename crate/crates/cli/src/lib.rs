//! Configuration loading, reports and subcommands of the `finsler` binary.

pub mod commands;
pub mod config;
pub mod report;

pub use config::{load_config, parse_config, ConfigError, RunConfig};
pub use report::Report;
