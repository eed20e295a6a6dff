//! Command-line front end: single evaluations, manifest batches, saliency
//! dumps, compositing and colour sweeps.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod report;

pub use args::Cli;
pub use commands::run;
pub use error::{CliError, CliResult};
