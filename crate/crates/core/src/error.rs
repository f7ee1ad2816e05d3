use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("topic list is empty")]
    EmptyTopicList,
    #[error("duplicate topic name {0:?}")]
    DuplicateTopic(String),
    #[error("unknown topic {0:?}")]
    UnknownTopic(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context} line {line}: {message}")]
    Parse {
        context: String,
        line: usize,
        message: String,
    },
    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),
    #[error("invalid split fractions: {0}")]
    InvalidFractions(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("connected component of {size} variables exceeds the enumeration limit of {limit}")]
    ComponentTooLarge { size: usize, limit: usize },
    #[error("contradictory evidence: all-zero message at variable {0}")]
    ContradictoryEvidence(usize),
    #[error("invalid model file: {0}")]
    ModelFormat(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no evaluable topic: no topic has a positive example")]
    NoEvaluableTopic,
    #[error("document {0:?} has no labels from the requested source")]
    MissingLabels(String),
    #[error("no positive labels")]
    NoPositives,
    #[error("non-finite value: {0}")]
    NonFinite(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            line,
            message: message.into(),
        }
    }

    /// Process exit status: 1 usage, 2 data, 3 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::InvalidFractions(_) => 1,
            Error::ContradictoryEvidence(_) | Error::NonFinite(_) => 3,
            _ => 2,
        }
    }
}
