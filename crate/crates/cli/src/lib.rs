//! Library behind the `swipt` command-line tool: instance-file loading,
//! energy-target sweeps with CSV output, and scheme-dominance comparison.

pub mod compare;
pub mod instance;
pub mod sweep;

use thiserror::Error;

/// Process exit codes: 0 success/feasible, 2 infeasible, 3 parse error,
/// 4 I/O error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("instance is infeasible: {0}")]
    Infeasible(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Solver(#[from] swipt_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Io(_) => 4,
            CliError::Solver(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
