use alloc::string::String;

/// Errors raised by the numerical and moment-theoretic routines.
///
/// Mathematical outcomes such as "no representing measure" are *not* errors;
/// they are reported through verdict types carrying a certificate. Errors are
/// reserved for malformed input and for numerical breakdown.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite (leading minor of order {minor_order})")]
    NotPositiveDefinite { minor_order: usize },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial degree {degree} exceeds the admissible maximum {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("index {index} out of range for a sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("order {order} too high: at most {max} allowed")]
    OrderTooHigh { order: isize, max: isize },
    #[error("{points} points need an order larger than {order}")]
    TooManyPoints { points: usize, order: usize },
    #[error("point {index} repeats an earlier point")]
    RepeatedPoint { index: usize },
    #[error("moment sequence must have even degree, got {degree}")]
    OddDegree { degree: usize },
    #[error("moment sequence is empty")]
    EmptySequence,
    #[error("the zeroth moment must be positive")]
    NonpositiveMass,
    #[error("moment sequence is nonsingular; it has no generating polynomial")]
    NotSingular,
    #[error("moment sequence is not positively recursively generated")]
    NotPrg,
    #[error("degree {degree} does not match {prescribed} prescribed nodes and d2 = {d2}")]
    DegreeMismatch {
        degree: usize,
        prescribed: usize,
        d2: usize,
    },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid measure: {0}")]
    InvalidMeasure(&'static str),
    #[error("instance spec is infeasible: {0}")]
    InfeasibleSpec(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
}

pub type Result<T> = core::result::Result<T, Error>;
