use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by key generation, encryption, evaluation, and the
/// discrete-log machinery.
#[derive(Debug, Error)]
pub enum FeError {
    /// The requested curve is not available in this build.
    #[error("unsupported curve '{requested}'; available: bls12-381")]
    UnsupportedCurve { requested: String },

    /// A feature vector entry exceeds the range the key material was set up
    /// for.
    #[error("feature entry at index {index} is {value}, exceeding the maximum {max}")]
    OutOfRangeEntry { index: usize, value: u64, max: u64 },

    /// The certified output bound does not fit the discrete-log capacity of
    /// the configured backend.
    #[error("certified bound {bound} exceeds the discrete-log capacity {capacity}")]
    BoundOverflow { bound: String, capacity: u128 },

    /// Ciphertext and functional key disagree about the key material, the
    /// backend, or the quadratic form they were issued for.
    #[error("functional key does not match ciphertext: {reason}")]
    KeyCiphertextMismatch { reason: String },

    /// A group element failed to decode or a sealed payload failed its
    /// integrity check.
    #[error("invalid group element ({context})")]
    InvalidGroupElement { context: String },

    /// The discrete logarithm lies outside the certified interval.
    #[error("discrete log not found within [-{bound}, {bound}]")]
    NotInRange { bound: u128 },

    /// Building the lookup table would exceed the configured disk budget.
    #[error("table requires {required} bytes, exceeding the budget of {budget} bytes")]
    DiskBudgetExceeded { required: u64, budget: u64 },

    /// Dimensions of the supplied matrices or vectors are inconsistent.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: String,
        expected: String,
        found: String,
    },

    /// A serialized artifact is malformed.
    #[error("malformed {kind} data at byte {offset}: {reason}")]
    Format {
        kind: &'static str,
        offset: usize,
        reason: String,
    },

    /// An underlying I/O operation failed.
    #[error("io error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl FeError {
    pub(crate) fn mismatch(reason: impl Into<String>) -> Self {
        FeError::KeyCiphertextMismatch {
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(context: impl Into<String>) -> Self {
        FeError::InvalidGroupElement {
            context: context.into(),
        }
    }

    pub(crate) fn dimension(
        context: impl Into<String>,
        expected: impl Into<String>,
        found: impl Into<String>,
    ) -> Self {
        FeError::Dimension {
            context: context.into(),
            expected: expected.into(),
            found: found.into(),
        }
    }

    pub(crate) fn format(kind: &'static str, offset: usize, reason: impl Into<String>) -> Self {
        FeError::Format {
            kind,
            offset,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FeError::Io {
            path: path.into(),
            source,
        }
    }
}
