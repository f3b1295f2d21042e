//! Configuration, experiment drivers, verification suite and output for the
//! `qlg` command.

pub mod cli;
pub mod config;
pub mod emit;
pub mod report;
pub mod run;
pub mod verify;

pub use config::{parse_config, ConfigError, Experiment, SimConfig};
pub use report::{Check, RunReport};
pub use run::execute;
