use thiserror::Error;

/// Errors raised by the sumset library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SumsetError {
    #[error("element/structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("nonempty sets required")]
    EmptySet,
    #[error("need at least two summands")]
    NeedTwoSummands,
    #[error("index {index} out of range for {len} summands")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("k must be positive")]
    NonPositiveK,
    #[error("graph dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("graph must be symmetric: {0}")]
    NonSymmetricGraph(String),
    #[error("{0}")]
    NotCommutative(String),
    #[error("S must be a subset of {0}")]
    NotSubset(String),
    #[error("modulus must be prime for Cauchy-Davenport")]
    NotPrime,
    #[error("exhaustive search cap exceeded: {0}")]
    SearchCap(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A proven statement failed on a concrete instance. Always an implementation bug.
    #[error("THEOREM VIOLATION: {0}")]
    TheoremViolation(String),
}

pub type Result<T> = std::result::Result<T, SumsetError>;
