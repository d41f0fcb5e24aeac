use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to print a
/// actionable one-line diagnostic; callers that can recover (for example
/// treating a zero-signal distance as benign) match on the variant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty token sequence")]
    EmptySequence,

    #[error("empty text")]
    EmptyText,

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("batch too small: need at least {need} items, got {got}")]
    BatchTooSmall { need: usize, got: usize },

    #[error("training corpus unbalanced: {0}")]
    CorpusUnbalanced(String),

    #[error("training corpus too small: need at least {need} items, got {got}")]
    CorpusTooSmall { need: usize, got: usize },

    #[error("head signal has near-zero norm")]
    ZeroSignal,

    #[error("empty score list: {0}")]
    EmptyScores(&'static str),

    #[error("empty corpus: {0}")]
    EmptyCorpus(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error("unsupported file format version {got} (supported: {supported})")]
    VersionMismatch { got: u32, supported: u32 },

    #[error("checksum mismatch in {context}: stored {stored}, computed {computed}")]
    ChecksumMismatch {
        context: &'static str,
        stored: String,
        computed: String,
    },

    #[error("malformed file {path}: {detail}")]
    MalformedFile { path: String, detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn malformed(path: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::MalformedFile {
            path: path.into(),
            detail: detail.into(),
        }
    }

    /// Process exit code for CLI use: 2 for configuration errors, 3 for
    /// missing artifacts, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidConfig(_) => 2,
            Error::MissingArtifact(_) => 3,
            _ => 1,
        }
    }
}
