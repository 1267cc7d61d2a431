use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("feature schema mismatch: expected version {expected}, got {found}")]
    SchemaMismatch { expected: u32, found: u32 },

    #[error("feature vector has {found} values, schema defines {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("training set contains a single class")]
    SingleClass,

    #[error("training set contains a single label")]
    SingleLabel,

    #[error("frequency {ghz} GHz for the {core} core is off the grid")]
    OffGridFrequency { core: &'static str, ghz: f64 },

    #[error("invalid cost model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid corpus manifest: {0}")]
    InvalidManifest(String),

    #[error("page directory {0} has no index.html")]
    MissingIndexHtml(PathBuf),

    #[error("malformed report file: {0}")]
    MalformedReport(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by bad user input rather than internal failure.
    /// The CLI maps these to exit code 2.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::SchemaMismatch { .. }
                | Error::DimensionMismatch { .. }
                | Error::EmptyCorpus
                | Error::TooFewSamples { .. }
                | Error::SingleClass
                | Error::SingleLabel
                | Error::OffGridFrequency { .. }
                | Error::InvalidParams(_)
                | Error::InvalidManifest(_)
                | Error::MissingIndexHtml(_)
                | Error::MalformedReport(_)
                | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
