use std::path::PathBuf;

use thiserror::Error;

use crate::stats::Level;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("unsupported file extension for {0} (expected .tsv or .jsonl)")]
    UnsupportedFormat(PathBuf),

    #[error("duplicate publication id `{0}`")]
    DuplicatePublication(String),

    #[error("corpus contains no publications")]
    EmptyCorpus,

    #[error("publication `{id}`: {reason}")]
    InvalidPublication { id: String, reason: String },

    #[error("reference {citing} -> {cited}: {reason}")]
    InvalidReference {
        citing: String,
        cited: String,
        reason: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid year window [{start}, {end}]")]
    InvalidWindow { start: i32, end: i32 },

    #[error("citation window starting {start} precedes publication year {year}")]
    WindowBeforePublication { start: i32, year: i32 },

    #[error("cannot combine an empty list of per-category scores")]
    EmptyScores,

    #[error("no publications in journal `{journal}` for year {year}")]
    EmptyCohort { journal: String, year: i32 },

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("cannot standardize a constant or too-short vector")]
    ConstantInput,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("recommendation levels absent from the data: {0:?}")]
    MissingLevels(Vec<Level>),

    #[error("bootstrap replicate {replicate} lacked a recommendation level after {attempts} draws")]
    BootstrapExhausted { replicate: usize, attempts: usize },

    #[error("invalid recommendation record: {0}")]
    InvalidRecommendation(String),

    #[error("too few joined records for evaluation: {0} (need at least 3)")]
    TooFewRecords(usize),

    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),

    #[error("unknown indicator `{0}`")]
    UnknownIndicator(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
