use thiserror::Error;

use crate::context::OPoint;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("invalid coweight: {0}")]
    InvalidCoweight(String),

    #[error("invalid enumeration window: {0}")]
    InvalidWindow(String),

    #[error("no coset minimum given for coset (tau={tau}, class {class})")]
    MissingCoset { tau: usize, class: i64 },

    #[error("coset (tau={tau}, class {class}) was given more than one minimum")]
    DuplicateCoset { tau: usize, class: i64 },

    #[error("point {point} does not lie in the context (tau out of range)")]
    PointOutOfRange { point: OPoint },

    #[error(
        "f-stability violated at {point}: f maps it to {image}, below the coset minimum {target}"
    )]
    FStabilityViolation {
        point: OPoint,
        image: OPoint,
        target: OPoint,
    },

    #[error("phi takes the value {value} at {point}; only 0 and 1 are supported")]
    NonMinusculePhi { point: OPoint, value: i64 },

    #[error("infeasible Hodge type: {0}")]
    InfeasibleHodgeType(String),

    #[error("Kottwitz mismatch: sum of m_tau is {sum} but m = {m}")]
    KottwitzMismatch { sum: i64, m: i64 },

    #[error("semi-modules live in different contexts")]
    ContextMismatch,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("precedence relation has a cycle through {0}")]
    CyclicPrecedence(OPoint),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("identity violated: {0}")]
    IdentityViolation(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("zero vector has no leading index")]
    ZeroVector,

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("field too small: {0}")]
    FieldTooSmall(String),

    #[error("lattice is not a point of the variety: {0}")]
    NotInVariety(String),

    #[error("malformed lattice document: {0}")]
    Format(String),
}
