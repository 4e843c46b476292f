//! Command-line front end: configuration files, single runs, sweeps over the
//! damping rate and the published figure sets, all written as CSV.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_evolve, cmd_figures, cmd_sweep, CliError, Deviation};
pub use config::{ConfigError, Engine, RawConfig, RunConfig};
