use thiserror::Error;

use crate::counting::CountTable;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field specification: {0}")]
    InvalidField(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("element is not a unit")]
    NotAUnit,

    #[error("requested precision {requested} exceeds available precision {available}")]
    PrecisionExceeded { requested: u32, available: u32 },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("result would not be integral: {0}")]
    NotIntegral(String),

    #[error("indeterminate input: {0}")]
    IndeterminateInput(String),

    #[error("polynomial is not distinguished in the last variable")]
    NotDistinguished,

    #[error("input is a unit at the base point")]
    UnitInput,

    #[error("no distinguished form found within {0} attempts")]
    SearchExhausted(u32),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("node budget of {budget} exceeded after {} complete levels", partial.rows.len())]
    BudgetExceeded { budget: u64, partial: Box<CountTable> },

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{name}` at position {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("negative power of the uniformizer at position {pos}")]
    NonIntegralCoefficient { pos: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("cache integrity error: {0}")]
    Integrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag used in JSON error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidField(_) => "InvalidField",
            Error::DivisionByZero => "DivisionByZero",
            Error::NotAUnit => "NotAUnit",
            Error::PrecisionExceeded { .. } => "PrecisionExceeded",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::NotIntegral(_) => "NotIntegral",
            Error::IndeterminateInput(_) => "IndeterminateInput",
            Error::NotDistinguished => "NotDistinguished",
            Error::UnitInput => "UnitInput",
            Error::SearchExhausted(_) => "SearchExhausted",
            Error::CertificationFailed(_) => "CertificationFailed",
            Error::InsufficientData(_) => "InsufficientData",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownVariable { .. } => "UnknownVariable",
            Error::NonIntegralCoefficient { .. } => "NonIntegralCoefficient",
            Error::PreconditionViolated(_) => "PreconditionViolated",
            Error::CapExceeded(_) => "CapExceeded",
            Error::Integrity(_) => "IntegrityError",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
