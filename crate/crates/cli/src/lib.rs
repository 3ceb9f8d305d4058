//! Command implementations behind the `spde-manifold` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use error::{CliError, CliResult};
