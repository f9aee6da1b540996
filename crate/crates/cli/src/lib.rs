//! Configuration-driven front end for the collectivity simulator.
//!
//! User-facing frequencies are linear (MHz); they are multiplied by `2π`
//! exactly once, in [`config::RunConfig`]'s accessors, before reaching the
//! core library. Every CSV and SVG written here starts with a comment line
//! recording the resolved configuration.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

pub use commands::{cmd_ensemble, cmd_single, cmd_spectrum, cmd_sweep, Command};
pub use config::{ConfigFile, Overrides, PulseConfig, RunConfig};
pub use error::CliError;
