//! Commands behind the `starfw` binary: solve a problem with one or more
//! stepsize rules, benchmark a suite, run the sampling checkers, and audit a
//! recorded run against the complexity bounds.

pub mod commands;
pub mod error;
pub mod output;
pub mod spec;

pub use commands::{cmd_audit, cmd_bench, cmd_check, cmd_run, BenchArgs, CheckArgs, RunArgs};
pub use error::CliError;
