//! Command-line driver: argument parsing, command execution and result
//! documents in JSON or CSV.

pub mod config;
pub mod document;
pub mod error;
pub mod run;

pub use config::{Cli, CommandArgs, CommonArgs, DomainSpec, Format, MethodArg, RunConfig, SweepArgs};
pub use document::ResultDocument;
pub use error::CliError;
pub use run::{execute, Outcome};
