//! Configuration, experiment drivers and reports for the `einlab` command-line
//! tool.

pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod probes;
pub mod report;
