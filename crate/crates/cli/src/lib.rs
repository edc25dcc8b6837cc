//! Batch front-end for the rate library.
//!
//! [`scenario`] parses scenario files, [`run`] evaluates the `rate`, `mc`,
//! `compare` and `sweep` commands and [`csv`] renders their output.

pub mod csv;
pub mod error;
pub mod run;
pub mod scenario;

pub use error::{CliError, CliResult};
pub use run::{run, Command, RunOptions};
pub use scenario::{parse_scenario, ScenarioFile};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "HETNET_RATE_THREADS";
