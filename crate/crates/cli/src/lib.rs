//! Scenario-driven front end: build canonical defect configurations, run
//! verification reports and dynamics, and write every product as plain data
//! files.

pub mod commands;
pub mod error;
pub mod output;
pub mod scenario;

pub use error::CliError;
pub use scenario::Scenario;
