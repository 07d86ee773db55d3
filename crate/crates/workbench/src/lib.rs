//! Command-line workbench for the `qudit-bell` crate: run specifications,
//! parallel drivers and JSON/CSV reports.

pub mod angle;
pub mod cli;
pub mod error;
pub mod parallel;
pub mod run;
pub mod spec;

pub use error::RunError;
pub use run::{execute, run, Outcome};
pub use spec::{parse_runspec, Overrides, ParseError, RunSpec};
