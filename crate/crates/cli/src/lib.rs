//! Command-line front end: flat key=value configs, scenario construction,
//! command dispatch, and deterministic CSV/report emission.

// range guards written as `!(x > 0.0)` reject NaN along with out-of-range
// values; the suggested `x <= 0.0` would let NaN through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod scenario;

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config(config::ConfigError),
    Io(std::io::Error),
    Numerical(skm_core::Error),
    Verification { failed: usize },
}

impl CliError {
    /// 1 config error, 2 numerical failure, 3 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Verification { failed } => {
                write!(f, "verification failed: {failed} check(s) did not pass")
            }
        }
    }
}

impl std::error::Error for CliError {}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<skm_core::Error> for CliError {
    fn from(e: skm_core::Error) -> Self {
        match e {
            // malformed scenarios are configuration problems; runtime
            // breakdowns are numerical
            skm_core::Error::PicardNotConverged { .. }
            | skm_core::Error::UnrecoverableStiffness { .. } => CliError::Numerical(e),
            _ => CliError::Config(config::ConfigError::Semantic(e.to_string())),
        }
    }
}
