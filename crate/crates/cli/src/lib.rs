//! Scenario runner behind the `qmoire` binary.

pub mod config;
pub mod csvio;
pub mod error;
pub mod scenario;

pub use error::{CliError, Result};
pub use scenario::{analyze, compare_profiles, evaluate, run_scenario, RunOptions, Scenario};
