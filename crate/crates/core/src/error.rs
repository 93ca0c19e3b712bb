use thiserror::Error;

/// Errors raised by the algebra kernels and the verification drivers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfcError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("no element of order {order} in a field of size {field_size}")]
    NoSuchRoot { order: u64, field_size: u128 },
    #[error("no cyclic subgroup of order {order} of the requested type for q = {q}")]
    NoSuchSubgroup { order: u64, q: u128 },
    #[error("desk-scale guard exceeded: {0}")]
    DeskScaleExceeded(String),
    #[error("divisibility pattern does not match family {family}: {detail}")]
    WrongFamily { family: String, detail: String },
    #[error("reducible or singular model: {0}")]
    ReducibleOrSingular(String),
    #[error("characteristic divides a group order: {0}")]
    TamenessViolation(String),
    #[error("Riemann-Hurwitz oracle inconsistency: {0}")]
    OracleFailure(String),
    #[error("unsupported normal form: {0}")]
    UnsupportedNormalForm(String),
    #[error("group closure exceeded bound {0}")]
    BoundExceeded(usize),
    #[error("subgroup is not normal: conjugating element {conjugator} by group element {by} leaves the subgroup")]
    NotNormal { conjugator: usize, by: usize },
    #[error("extension degree {0} is not enough to make every short-orbit place rational")]
    RaiseExtension(usize),
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("relation is reducible: {0}")]
    ReducibleRelation(String),
    #[error("degenerate map: {0}")]
    DegenerateMap(String),
}

pub type Result<T> = std::result::Result<T, GfcError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(GfcError::InvalidParameter(msg.into()))
}
