use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("I/O error")]
    Stream(#[from] io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("truncated binary model: read {read} of {expected} entries")]
    Truncated { read: usize, expected: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("no vectors to aggregate")]
    NoVectors,

    #[error("undefined cosine for zero vector")]
    ZeroVector,

    #[error("senses not representable in model")]
    Unrepresentable,

    #[error("sense {0} has no synonyms")]
    NoSynonyms(String),

    #[error("invalid lexicon: {0}")]
    Lexicon(String),

    #[error("unknown keyword: {0}")]
    UnknownKeyword(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("invalid dataset: {0}")]
    Dataset(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
