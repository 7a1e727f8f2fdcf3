//! File formats, reports and the command-line front end for `f3n-core`.

pub mod cli;
pub mod error;
pub mod report;
pub mod selftest;
pub mod setfile;
pub mod specdump;

pub use cli::run;
pub use error::{CliError, CliResult};
