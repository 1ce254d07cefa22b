use std::path::PathBuf;

use vulnaudit_core::{CrossSetError, EvalError, LedgerError, VocabularyError};

/// Everything that can go wrong in IO, rendering or the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: row {row} (line {line}): {reason}")]
    MalformedRow {
        path: PathBuf,
        /// Zero-based data row.
        row: usize,
        /// One-based physical line.
        line: u64,
        reason: String,
    },
    #[error("{path}: required column `{column}` is missing")]
    ColumnMissing { path: PathBuf, column: String },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Prediction {
        path: PathBuf,
        #[source]
        source: EvalError,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    CrossSet(#[from] CrossSetError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("invalid tag vocabulary: {0}")]
    Vocabulary(#[from] VocabularyError),
    #[error("unknown report section `{0}`")]
    UnknownSection(String),
    #[error("unsupported report schema `{0}`")]
    Schema(String),
    #[error("{0}")]
    Config(String),
    /// Bad command-line usage detected after argument parsing.
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
