use thiserror::Error;

/// Errors raised by the verification toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coefficient ring mismatch")]
    RingMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("leading coefficient is not invertible in the coefficient ring")]
    NonInvertibleLeading,
    #[error("extension degree {0} outside supported range 1..=6")]
    DegreeOutOfRange(usize),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{a} is not a unit modulo {n}")]
    NotAUnit { a: u64, n: u64 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("bad reduction at p = {p}: {reason}")]
    BadReduction { p: u64, reason: String },
    #[error("enumeration of {size} field elements exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: u64 },
    #[error("Weil bound violated: N = {count} over F_{q} for genus {genus}")]
    WeilViolation { count: u64, q: u64, genus: usize },
    #[error("out of theorem scope: {0}")]
    OutOfScope(String),
    #[error("group of order {0} exceeds the enumeration cap")]
    GroupTooLarge(usize),
    #[error("automorphism is not an involution")]
    NotInvolution,
    #[error("differential is not in the span of the regular basis: {0}")]
    NotRegular(String),
    #[error("cyclotomic context mismatch")]
    ContextMismatch,
    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
