use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("variable tables do not match")]
    TableMismatch,
    #[error("no shift variable declared")]
    NoShiftVar,
    #[error("singular evaluation at k = {k}")]
    SingularEvaluation { k: i64 },
    #[error("not compatible: {0}")]
    NotCompatible(String),
    #[error("insufficient terms: {0}")]
    InsufficientTerms(String),
    #[error("missing initial value at singular index {0}")]
    MissingInitial(i64),
    #[error("inconsistent initial values: {0}")]
    Inconsistent(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Usage(_) => 2,
            Error::Budget(_) => 3,
            _ => 1,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "division_by_zero",
            Error::TableMismatch => "table_mismatch",
            Error::NoShiftVar => "no_shift_var",
            Error::SingularEvaluation { .. } => "singular_evaluation",
            Error::NotCompatible(_) => "not_compatible",
            Error::InsufficientTerms(_) => "insufficient_terms",
            Error::MissingInitial(_) => "missing_initial",
            Error::Inconsistent(_) => "inconsistent_initials",
            Error::Parse { .. } => "parse_error",
            Error::Usage(_) => "usage",
            Error::Budget(_) => "budget_exceeded",
            Error::Invalid(_) => "invalid",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
