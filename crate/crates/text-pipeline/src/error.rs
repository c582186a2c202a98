use thiserror::Error;

/// Errors produced by the text pipeline.
#[derive(Debug, Error)]
pub enum PipelineError {
    /// An email was rejected by the preprocessing length policy.
    #[error("email rejected: {reason}")]
    Rejected { reason: RejectReason },

    /// Input bytes were not valid UTF-8.
    #[error("input is not valid UTF-8 at byte {position}")]
    Decode { position: usize },

    /// A vocabulary was requested over a corpus with no usable documents.
    #[error("corpus contains no usable documents")]
    EmptyCorpus,

    /// A training-corpus operation met a document without a label.
    #[error("document {id} has no label")]
    Unlabeled { id: String },

    /// A term was looked up that the vocabulary does not contain.
    #[error("unknown term: {term:?}")]
    UnknownTerm { term: String },

    /// More features were requested than the vocabulary holds.
    #[error("requested {requested} features but vocabulary has only {available} terms")]
    NTooLarge { requested: usize, available: usize },

    /// A stratified split would leave a class empty on one side.
    #[error("degenerate split: class {class} has {count} documents, ratio {ratio} leaves a partition empty")]
    DegenerateSplit { class: String, count: usize, ratio: f64 },

    /// An artifact file failed structural validation.
    #[error("malformed artifact {path}: line {line}: {reason}")]
    Format { path: String, line: usize, reason: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Why preprocessing rejected an email.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    TooShort { tokens: usize },
    TooLong { tokens: usize },
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RejectReason::TooShort { tokens } => write!(f, "too short ({tokens} tokens)"),
            RejectReason::TooLong { tokens } => write!(f, "too long ({tokens} tokens)"),
        }
    }
}

impl PipelineError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        PipelineError::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<String>, line: usize, reason: impl Into<String>) -> Self {
        PipelineError::Format { path: path.into(), line, reason: reason.into() }
    }
}
