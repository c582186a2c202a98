use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("config {path}: {reason}")]
    Config { path: String, reason: String },

    #[error("dataset root {root:?} is missing or holds no emails")]
    MissingDataset { root: String },

    #[error("missing artifact {path}: {hint}")]
    MissingArtifact { path: String, hint: String },

    #[error("{artifact} digest mismatch: the manifest records {expected} but the current bytes hash to {found}; the artifact changed after it was produced, re-run the producing command")]
    DigestMismatch { artifact: String, expected: String, found: String },

    #[error("{path}:{line}: {reason}")]
    Format { path: String, line: usize, reason: String },

    #[error("functional key bound {bound} exceeds the discrete-log capacity {capacity}; lower features.bit_width, features.n, or features.x_max")]
    BoundOverflow { bound: String, capacity: u128 },

    #[error("invalid invocation: {reason}")]
    Usage { reason: String },

    #[error(transparent)]
    Pipeline(#[from] text_pipeline::PipelineError),

    #[error(transparent)]
    QuadNet(#[from] quad_net::QuadNetError),

    #[error(transparent)]
    Fe(#[from] fe_scheme::FeError),

    #[error(transparent)]
    He(#[from] he_baseline::HeError),

    #[error(transparent)]
    Leak(#[from] leakage_lab::LeakError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    pub fn config(path: impl Into<String>, reason: impl Into<String>) -> AppError {
        AppError::Config { path: path.into(), reason: reason.into() }
    }

    pub fn format(path: impl Into<String>, line: usize, reason: impl Into<String>) -> AppError {
        AppError::Format { path: path.into(), line, reason: reason.into() }
    }

    pub fn usage(reason: impl Into<String>) -> AppError {
        AppError::Usage { reason: reason.into() }
    }

    pub fn io(path: impl std::fmt::Display, source: std::io::Error) -> AppError {
        AppError::Io { path: path.to_string(), source }
    }
}
