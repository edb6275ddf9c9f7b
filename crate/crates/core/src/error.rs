use thiserror::Error;

/// Failures of the exact/certified arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("domain error: {0}")]
    Domain(String),
    /// The enclosure is too wide to decide the requested operation; retry at a
    /// higher precision.
    #[error("undecided at {bits} bits")]
    Undecided { bits: u32 },
    #[error("precision cap of {cap} bits reached: {what}")]
    PrecisionCap { cap: u32, what: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TupleError {
    #[error("invalid D({n}) set: {detail}")]
    Invalid { n: i64, detail: String },
    #[error("unsupported D({0}); only D(4) recurrences are implemented")]
    UnsupportedN(i64),
    #[error("pair out of scope: {0}")]
    OutOfScope(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PellError {
    #[error("non-integral recurrence term: {0}")]
    NonIntegralTerm(String),
    #[error("unknown or unsupported c label {0}")]
    UnknownLabel(String),
    #[error("case is not admissible: {0}")]
    Inadmissible(String),
    #[error("fundamental-solution search space too large (bound {0})")]
    SearchTooLarge(String),
    #[error("invalid equation: {0}")]
    InvalidEquation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinformError {
    #[error("out of scope: {0}")]
    OutOfScope(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("Mignotte constraint violated: {0}")]
    Constraint(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Pell(#[from] PellError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("reduction failed: {0}")]
    Failed(String),
    #[error(transparent)]
    Linform(#[from] LinformError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Pell(#[from] PellError),
}

impl From<PellError> for TupleError {
    fn from(e: PellError) -> Self {
        TupleError::Invariant(e.to_string())
    }
}
