//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by series construction, evaluation and parsing.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QError {
    /// Inversion of a series whose leading term is not an invertible constant.
    #[error("series is not a unit: {0}")]
    NonUnit(String),

    /// A comparison or extraction was requested beyond the tracked precision.
    #[error("insufficient precision: need {needed}, have {have}")]
    InsufficientPrecision { needed: String, have: String },

    /// Infinite product with a base whose exponent makes the product meaningless.
    #[error("divergent infinite product: base {0}")]
    DivergentProduct(String),

    /// Finite Pochhammer with index < -1, or -1 outside the (q;q)_{-1} convention.
    #[error("unsupported negative Pochhammer index: {0}")]
    UnsupportedNegativeIndex(String),

    /// A basic hypergeometric series that neither terminates nor truncates.
    #[error("series does not terminate or truncate: {0}")]
    NonTerminating(String),

    /// A lower parameter hits q^{-m} inside the summation range.
    #[error("pole in lower parameter: {0}")]
    PoleInLowerParameter(String),

    /// A closed-form summation was requested outside its implemented patterns.
    #[error("unsupported specialization: {0}")]
    UnsupportedSpecialization(String),

    /// A theorem evaluation is missing a required parameter.
    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    /// A parameter assignment violates the theorem's exponent conditions.
    #[error("inadmissible parameter assignment: {0}")]
    InadmissibleParameter(String),

    /// Catalog text failed to parse.
    #[error("syntax error at line {line}, column {col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },

    /// Two catalog records share a label.
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    /// Substitution q -> -q on a series with genuinely fractional exponents.
    #[error("operation requires integral exponents: {0}")]
    FractionalExponent(String),
}

pub type QResult<T> = Result<T, QError>;
