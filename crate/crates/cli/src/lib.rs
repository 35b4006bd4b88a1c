//! Command-line front end: argument parsing, table reproduction and report
//! rendering for the `anger-weber` binary.

pub mod angle;
pub mod commands;
pub mod report;
pub mod tables;

pub use commands::{run, Cli};
