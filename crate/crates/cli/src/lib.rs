//! Command-line front end: job parsing, execution and report rendering.

pub mod error;
pub mod exec;
pub mod job;
pub mod report;

pub use error::CliError;
pub use exec::{build_report, execute};
pub use job::{job_from_cli, parse_config, Cli, Format, Job};
pub use report::{Cell, Report, Table};
