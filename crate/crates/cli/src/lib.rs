//! Library surface of the experiment runner: config parsing, run/sweep
//! execution and report writers, reused by the binary and the test suites.

pub mod config;
pub mod legendre;
pub mod runner;
pub mod sweep;
pub mod verify;

pub use config::{parse_config, ConfigError, ExperimentConfig};
pub use runner::{cmd_run, execute_run, RunOutcome};
