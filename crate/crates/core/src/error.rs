use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty corpus: {0}")]
    EmptyCorpus(&'static str),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("loss became non-finite at iteration {iteration}")]
    NonFiniteLoss { iteration: usize },

    #[error("keyword {0:?} does not occur in any article")]
    KeywordAbsent(String),

    #[error("{what} {value} out of range {range}")]
    OutOfRange {
        what: &'static str,
        value: String,
        range: String,
    },

    #[error("policy {policy} is not on the agenda of meeting {meeting}")]
    NotOnAgenda { policy: String, meeting: String },

    #[error("unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: String },

    #[error("{0} side of the split is empty")]
    EmptySplit(&'static str),

    #[error("no positive examples to evaluate")]
    NoPositives,

    #[error("external classifier error: {0}")]
    External(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
