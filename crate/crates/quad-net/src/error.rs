use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadNetError {
    #[error("shape mismatch in {context}: expected {expected}, found {found}")]
    ShapeMismatch { context: &'static str, expected: String, found: String },

    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Divergence { epoch: usize, loss: f64 },

    #[error("integer overflow in encrypted-part evaluation")]
    Overflow,

    #[error("malformed model file {path}: line {line}: {reason}")]
    Format { path: String, line: usize, reason: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl QuadNetError {
    pub fn shape(context: &'static str, expected: impl Into<String>, found: impl Into<String>) -> Self {
        QuadNetError::ShapeMismatch { context, expected: expected.into(), found: found.into() }
    }

    pub fn format(path: impl Into<String>, line: usize, reason: impl Into<String>) -> Self {
        QuadNetError::Format { path: path.into(), line, reason: reason.into() }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        QuadNetError::Io { path: path.into(), source }
    }
}
