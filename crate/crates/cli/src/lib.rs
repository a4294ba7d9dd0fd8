//! Config loading, result records and the command implementations behind
//! the `tiaopt` binary.

pub mod app;
pub mod cache;
pub mod commands;
pub mod config;
pub mod outdir;
pub mod records;

pub use commands::{cmd_experiment, cmd_search, cmd_systematic, Options};
pub use config::{LoadedConfig, RunConfig};
