//! Command-line front end for `regcauchy`: the measure specification format,
//! experiment reports, and the subcommands.

pub mod commands;
pub mod error;
pub mod report;
pub mod spec;

pub use error::{CliError, CliResult};
