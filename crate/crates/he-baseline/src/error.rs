use thiserror::Error;

/// Errors from key generation, training, encoding and encrypted scoring.
#[derive(Debug, Error)]
pub enum HeError {
    #[error("training diverged at epoch {epoch}")]
    Divergence { epoch: usize },

    #[error("fixed-point encoding {value} exceeds the plaintext capacity {capacity}")]
    EncodingOverflow { value: String, capacity: String },

    #[error("expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid ciphertext: {reason}")]
    InvalidCiphertext { reason: String },

    #[error("fixed-point scale of {scale_bits} bits is below the minimum of {min}")]
    ScaleTooSmall { scale_bits: u32, min: u32 },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("malformed {kind} at byte {offset}: {reason}")]
    Format {
        kind: &'static str,
        offset: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn invalid_ct(reason: impl Into<String>) -> HeError {
    HeError::InvalidCiphertext {
        reason: reason.into(),
    }
}

pub(crate) fn format_err(
    kind: &'static str,
    offset: usize,
    reason: impl Into<String>,
) -> HeError {
    HeError::Format {
        kind,
        offset,
        reason: reason.into(),
    }
}

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> HeError {
    HeError::Io {
        path: path.display().to_string(),
        source,
    }
}
