//! Experiment drivers behind the CLI subcommands.

pub mod checks;
pub mod convergence;
pub mod manufacture;
pub mod solve;

use crate::error::Outcome;

/// What a command hands back to the CLI.
#[derive(Clone, Debug)]
pub struct CommandResult {
    pub outcome: Outcome,
    /// Human-readable summary for stdout.
    pub summary: String,
}
