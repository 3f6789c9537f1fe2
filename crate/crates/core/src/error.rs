use thiserror::Error;

/// Errors raised by the arithmetic kernels, transform drivers and parameter builders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u128, modulus: u128 },

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("{what} = {value} is outside {range}")]
    OutOfRange {
        what: &'static str,
        value: i128,
        range: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("unknown butterfly kind `{0}`")]
    UnknownKind(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("search needs {needed} cases but the budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(what: &'static str, value: impl Into<i128>, range: String) -> Error {
    Error::OutOfRange {
        what,
        value: value.into(),
        range,
    }
}
