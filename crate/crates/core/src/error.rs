use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0} is empty")]
    EmptyInput(String),

    #[error("duplicate verse id {verse_id:?} at line {line}")]
    DuplicateVerse { verse_id: String, line: usize },

    #[error("alignment file has {found} lines but the corpus has {expected} pairs")]
    AlignmentLineCount { expected: usize, found: usize },

    #[error("pair {pair}: link {link:?} is out of range ({source_len} source, {target_len} target tokens)")]
    LinkOutOfRange {
        pair: usize,
        link: String,
        source_len: usize,
        target_len: usize,
    },

    #[error("no seed coverage: no alignment link has a source word from the seed lexicon")]
    NoSeedCoverage,

    #[error("negative count in contingency table")]
    NegativeCount,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("word {0:?} not found")]
    UnknownWord(String),

    #[error("embedding spaces share no vocabulary")]
    EmptyIntersection,

    #[error("no lexicon word is present in both embedding spaces")]
    NoDriftCoverage,

    #[error("training data contains a single class")]
    SingleClass,

    #[error("objective became non-finite during optimization")]
    NonFiniteObjective,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("unknown strategy {name:?}; registered: {known}")]
    UnknownStrategy { name: String, known: String },

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("serialization error: {0}")]
    Serde(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
