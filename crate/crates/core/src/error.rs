use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its validity rule. `key` names the offending setting.
    #[error("invalid configuration `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("soliton profile is singular at x = {x} (1 + B·exp(2√2·x) = 0)")]
    SingularProfile { x: f64 },

    #[error("saturable nonlinearity is singular at sample {index} (|ψ|² = {intensity})")]
    SingularNonlinearity { index: usize, intensity: f64 },

    #[error("grid mismatch: {left_points} points over {left_length} vs {right_points} points over {right_length}")]
    GridMismatch {
        left_length: f64,
        left_points: usize,
        right_length: f64,
        right_points: usize,
    },

    /// Non-finite amplitudes or runaway norm growth.
    #[error("run diverged at step {step} (last finite norm {last_finite_norm})")]
    Diverged { step: usize, last_finite_norm: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: expected {expected} data rows, found {found}")]
    LengthMismatch {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
