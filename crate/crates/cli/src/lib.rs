//! Scenario catalog, configuration and reports for `moser-lab`.

pub mod catalog;
pub mod error;
pub mod report;
pub mod runner;
pub mod spec;

pub use error::CliError;
