use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coefficient index {index} is beyond the truncation order {nmax}")]
    BeyondTruncation { index: usize, nmax: usize },

    #[error("unsupported weight {0}")]
    UnsupportedWeight(i64),

    #[error("truncation order {nmax} is too small, need at least {needed}")]
    InsufficientPrecision { nmax: usize, needed: usize },

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("discriminant must be nonzero")]
    ZeroDiscriminant,

    #[error("discriminant {d} is not parity matched with weight {k}")]
    ParityMismatch { d: i64, k: u32 },

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("numerical assertion failed: {0}")]
    Assertion(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("invalid resonator specification: {0}")]
    InvalidSpec(String),

    #[error("method not applicable: {0}")]
    Method(String),

    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl Error {
    /// Numerical assertion failures are reported differently from usage errors.
    pub fn is_assertion(&self) -> bool {
        matches!(
            self,
            Error::Assertion(_) | Error::Convergence(_)
        )
    }
}
