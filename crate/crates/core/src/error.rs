use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("invalid ring parameters: {0}")]
    InvalidParams(String),
    #[error("ring parameters differ between operands")]
    ParamsMismatch,
    #[error("integer overflow: {0}")]
    Overflow(String),
    #[error("invalid Eisenstein polynomial: {0}")]
    InvalidEisenstein(String),
    #[error("invalid summand: {0}")]
    InvalidSummand(String),
    #[error("insufficient precision: {what} needs {needed}, have {have}")]
    InsufficientPrecision { what: String, needed: u64, have: u64 },
    #[error("no fast path for summand {0} and no presentation available")]
    UnsupportedSummand(String),
    #[error("summand {0} is not p-torsion; use the p-adic devissage path")]
    MixedPPower(String),
    #[error("enumeration budget exceeded: {size} > {budget}")]
    BudgetExceeded { size: u128, budget: u64 },
    #[error("module is infinite at working precision: {0}")]
    InfiniteModule(String),
    #[error("cardinality {0} is not a power of p")]
    NotPPower(u128),
    #[error("search inconclusive: {0}")]
    SearchInconclusive(String),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("profile window too short: need n up to {needed}, have {have}")]
    WindowTooShort { needed: usize, have: usize },
    #[error("exponent counts differ: r = {crys} but s = {dr}")]
    CountMismatch { crys: usize, dr: usize },
    #[error("Q-length {q_len} exceeds E-torsion bound {bound}")]
    QExceedsBound { q_len: u64, bound: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn precision(what: impl Into<String>, needed: u64, have: u64) -> Self {
        Error::InsufficientPrecision {
            what: what.into(),
            needed,
            have,
        }
    }

    pub fn is_precision(&self) -> bool {
        matches!(self, Error::InsufficientPrecision { .. })
    }
}
