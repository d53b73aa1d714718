//! Error type shared across the crate.
//!
//! Every failure is one of four kinds, and the CLI maps them onto process exit
//! codes: success = 0, configuration/input = 1, numerical blow-up = 2, I/O = 3.

use std::fmt;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Bad configuration or degenerate input (unknown key, missing key,
    /// non-divisible grid extent, zero-norm reference field, ...).
    #[error("config error: {0}")]
    Config(String),

    /// The explicit integrator produced a non-finite or absurd field value.
    /// `step` is the index of the step whose *result* tripped the detector.
    #[error("numerical blow-up at step {step}: {reason}")]
    BlowUp { step: u64, reason: String },

    /// Filesystem trouble while writing or reading run artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Helper for formatted config errors.
    pub fn config(msg: impl fmt::Display) -> Self {
        Error::Config(msg.to_string())
    }

    /// Process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::BlowUp { .. } => 2,
            Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
