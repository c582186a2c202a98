use thiserror::Error;

/// Errors from labeling, head training and the collateral experiments.
#[derive(Debug, Error)]
pub enum LeakError {
    #[error("k = {k} exceeds the vocabulary size {vocab}")]
    KTooLarge { k: usize, vocab: usize },

    #[error("degenerate labeling: {reason}")]
    DegenerateLabeling { reason: String },

    #[error("training diverged at epoch {epoch} with loss {loss}")]
    Divergence { epoch: usize, loss: f64 },

    #[error("{context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("sweep table line {line}: {reason}")]
    Table { line: usize, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn degenerate(reason: impl Into<String>) -> LeakError {
    LeakError::DegenerateLabeling {
        reason: reason.into(),
    }
}

pub(crate) fn dimension(context: &'static str, expected: usize, found: usize) -> LeakError {
    LeakError::Dimension {
        context,
        expected,
        found,
    }
}

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> LeakError {
    LeakError::Io {
        path: path.display().to_string(),
        source,
    }
}
