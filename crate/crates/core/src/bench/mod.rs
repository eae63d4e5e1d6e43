//! Benchmark harness: run configurations, commands and CSV output.

pub mod commands;
pub mod config;
pub mod csv;

pub use commands::{execute, exit_code, Command};
pub use config::Config;
