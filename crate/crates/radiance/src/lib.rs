//! Command-line driver for `radiance-core`: configuration files, CSV and
//! JSON output, parameter sweeps and the series-versus-oracle report.

pub mod compare;
pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod sweep;

pub use config::{Mode, RunConfig};
pub use error::CliError;
pub use output::Report;
pub use run::{execute, run, with_threads};
