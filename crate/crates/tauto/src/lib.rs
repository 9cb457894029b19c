//! Std companion to `tauto-core`: JSON file formats, multi-threaded
//! evaluation, the verification suites and the `tauto` command line.

pub mod cli;
pub mod error;
pub mod format;
pub mod parallel;
pub mod verify;

pub use error::CliError;
