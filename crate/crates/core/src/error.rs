use thiserror::Error;

/// Errors produced by shift construction, enumeration, and analysis.
#[derive(Error, Debug)]
pub enum Error {
    #[error("symbol {symbol:?} is not in the alphabet")]
    SymbolNotInAlphabet { symbol: String },

    #[error("symbol index {index} out of range for alphabet of size {size}")]
    SymbolIndexOutOfRange { index: usize, size: usize },

    #[error("invalid shift specification: {0}")]
    InvalidSpec(String),

    #[error("digit expansion is not admissible: {0}")]
    InadmissibleExpansion(String),

    #[error("word is not in the language: {0}")]
    WordNotInLanguage(String),

    #[error("collection not materialized deep enough: need length {needed}, have {have}")]
    InsufficientDepth { needed: usize, have: usize },

    #[error("enumeration budget exceeded: requested length {requested}, budget {budget}")]
    BudgetExceeded { requested: usize, budget: usize },

    #[error("transition graph is reducible; components: {components:?}")]
    ReducibleSft { components: Vec<Vec<String>> },

    #[error("shift is empty (no bi-infinite points)")]
    EmptyShift,

    #[error("no periodic points of period {period}")]
    NoPeriodicPoints { period: usize },

    #[error("empty word collection")]
    EmptyCollection,

    #[error("membership is horizon-limited here; cannot decide {0}")]
    Undecidable(String),

    #[error("power iteration failed to converge within {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
