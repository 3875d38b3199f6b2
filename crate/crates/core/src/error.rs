use std::path::PathBuf;

use chrono::NaiveDate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("non-positive price {price} for {ticker} on {date}")]
    NonPositivePrice {
        date: NaiveDate,
        ticker: String,
        price: f64,
    },

    #[error("ticker {0} not present in data")]
    MissingTicker(String),

    #[error("only {0} aligned dates survive; need at least 2")]
    TooFewDates(usize),

    #[error("window {window} too small for {dims} tickers (need at least {min})")]
    WindowTooSmall { window: usize, dims: usize, min: usize },

    #[error("insufficient history: need more than {needed} days, have {available}")]
    InsufficientHistory { needed: usize, available: usize },

    #[error("invalid portfolio state: {0}")]
    InvalidState(String),

    #[error("infeasible action: {0}")]
    InfeasibleAction(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("trajectory misaligned at {date}: {message}")]
    Misaligned { date: NaiveDate, message: String },

    #[error("negative shares {shares} for {ticker} on {date}")]
    NegativeShares {
        date: NaiveDate,
        ticker: String,
        shares: i64,
    },

    #[error("holdings on {date} cost more than available cash (shortfall {shortfall})")]
    Unaffordable { date: NaiveDate, shortfall: f64 },

    #[error("training set contains a single class")]
    SingleClass,

    #[error("non-finite feature value at row {row}, column {col}")]
    NonFiniteFeature { row: usize, col: usize },

    #[error("empty feature matrix")]
    EmptyMatrix,

    #[error("too few samples for {folds}-fold stratification: class {class} has {count}")]
    TooFewForFolds {
        folds: usize,
        class: usize,
        count: usize,
    },

    #[error("invalid classifier spec: {0}")]
    InvalidSpec(String),

    #[error("series too short: need at least {needed} points, have {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("series contains non-positive value {0}")]
    NonPositiveValue(f64),

    #[error("undefined Sharpe ratio: excess returns have zero dispersion")]
    UndefinedSharpe,

    #[error("undefined Calmar ratio: zero maximum drawdown")]
    UndefinedCalmar,

    #[error("invalid config: {field}: {message}")]
    Config { field: String, message: String },

    #[error("classifier group {0} out of range (expected 1-5)")]
    GroupOutOfRange(u8),

    #[error("empty tau grid")]
    EmptyTauGrid,

    #[error("{0}")]
    Precondition(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Csv {
            path: path.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
