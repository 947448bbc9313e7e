//! Instance files, reports, verification suites and the command layer
//! behind the `pandora` binary.

pub mod cli;
pub mod commands;
pub mod file;
pub mod random;
pub mod report;
pub mod verify;
