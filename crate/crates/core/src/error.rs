use thiserror::Error;

/// Failures surfaced by the library. Precondition violations are reported
/// with the violated condition; `Internal` marks a broken arithmetic
/// invariant and never results from valid input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("prime {p} is out of range: {reason}")]
    PrimeOutOfRange { p: String, reason: &'static str },
    #[error("the zero form is not allowed here")]
    ZeroForm,
    #[error("form is degenerate (discriminant 0)")]
    Degenerate,
    #[error("form is not primitive (content {0})")]
    NotPrimitive(String),
    #[error("form is reducible over Q")]
    Reducible,
    #[error("form vanishes identically mod {0}")]
    ZeroModP(String),
    #[error("{root} is not a root of the form mod {p}")]
    NotARoot { p: String, root: String },
    #[error("{root} is a multiple root of the form mod {p}")]
    MultipleRoot { p: String, root: String },
    #[error("form does not split completely mod {0}")]
    NotSplit(String),
    #[error("invariant pair ({0}, {1}) does not occur for integral quartic forms")]
    Inadmissible(String, String),
    #[error("epsilon {0} outside (0, 1/6)")]
    EpsilonOutOfRange(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("construction failed after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("{stage}: {detail}")]
    Stage { stage: &'static str, detail: String },
    #[error("i/o: {0}")]
    Io(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub(crate) fn stage(stage: &'static str, err: impl std::fmt::Display) -> Self {
        Error::Stage {
            stage,
            detail: err.to_string(),
        }
    }
}
