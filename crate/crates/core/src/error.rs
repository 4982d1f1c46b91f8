use thiserror::Error;

use crate::model::{DeviceId, JobId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("failed to parse config: {0}")]
    Parse(String),

    #[error("device {device} is not eligible for job {job}")]
    Ineligible { device: DeviceId, job: JobId },

    #[error(
        "job {job} is starved: needs {needed} devices but only {available} are eligible and free (short by {shortfall})"
    )]
    Starved {
        job: JobId,
        needed: usize,
        available: usize,
        shortfall: usize,
    },

    #[error("device {device} holds no samples for job {job}")]
    NoData { device: DeviceId, job: JobId },

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("parameter length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("simulation deadlocked at t={time:.3}s\n{dump}")]
    Deadlock { time: f64, dump: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
