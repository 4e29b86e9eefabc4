use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    MalformedRow {
        path: String,
        line: u64,
        message: String,
    },

    #[error("days must be strictly increasing: day {day} follows {previous}")]
    NonMonotoneDays { day: f64, previous: f64 },

    #[error("negative value {value} at day {day}")]
    NegativeValue { day: f64, value: f64 },

    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("series needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("day {t} outside series range [{first}, {last}]")]
    OutOfRange { t: f64, first: f64, last: f64 },

    #[error("future series starts at day {future_start}, before historical end {historical_end}")]
    SpliceOverlap {
        historical_end: f64,
        future_start: f64,
    },

    #[error("unknown chart {0:?} (expected market-price, transaction-fees or hash-rate)")]
    UnknownChart(String),

    #[error("http request to {url} failed: {message}")]
    Http { url: String, message: String },

    #[error("malformed chart payload: {0}")]
    Payload(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn params(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
