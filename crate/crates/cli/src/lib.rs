//! Command-line pipeline around the core model: configuration ingestion,
//! the five pipeline commands, and plot-data emission.

// validation deliberately writes `!(x > 0.0)` so NaN fails closed
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod report;
pub mod survey;

use std::fmt;

/// Output schema version stamped into every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or malformed input; exits 2.
    Validation(String),
    /// Degenerate strategy or phase failure escalated by `--strict`;
    /// exits 3.
    Degenerate(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "validation error: {msg}"),
            CliError::Degenerate(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
