use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("symbol {symbol} at position {position} is outside the alphabet of size {alphabet_size}")]
    SymbolOutOfAlphabet {
        symbol: u8,
        position: usize,
        alphabet_size: usize,
    },

    #[error("invalid alphabet size {0} (must be in 2..=255)")]
    InvalidAlphabet(usize),

    #[error("alphabet mismatch: expected size {expected}, found {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("model `{0}` does not expose exact rational conditionals")]
    UnsupportedBackend(String),

    #[error("sequence length {len} exceeds the exact-oracle horizon {horizon}")]
    OracleHorizonExceeded { len: usize, horizon: usize },

    #[error("conditional undefined: history has zero probability under `{0}`")]
    UndefinedConditional(String),

    #[error("normalization undefined: all continuations have zero mass")]
    UndefinedNormalization,

    #[error("configuration: {0}")]
    Configuration(String),

    #[error("model `{0}` is not a component of the mixture")]
    NotAComponent(String),

    #[error("exhaustive enumeration of {alphabet_size}^{horizon} sequences exceeds the limit 2^24; use Monte Carlo mode")]
    EnumerationTooLarge { alphabet_size: usize, horizon: usize },

    #[error("model `{0}` is a semimeasure; sampling is only defined for measures")]
    NotAMeasure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("budget out of range: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;
