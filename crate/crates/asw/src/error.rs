use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("characteristic mismatch: {0} vs {1}")]
    CharMismatch(u32, u32),
    #[error("cannot mix {0}")]
    ContextMismatch(String),
    #[error("indeterminate at current precision: {0}")]
    IndeterminateAtPrecision(String),
    #[error("negative valuation {0}")]
    NegativeValuation(i64),
    #[error("not a p-th power")]
    NotPthPower,
    #[error("totally ramified: valuation {valuation} is not divisible by p = {p}")]
    TotallyRamified { valuation: i64, p: u32 },
    #[error("iteration budget {0} exhausted")]
    NonTerminatingBudget(usize),
    #[error("element not in the span of the p-basis")]
    NotInSpan,
    #[error("ramification assumption violated: {0}")]
    RamifiedAssumptionViolated(String),
    #[error("special fibre is reducible: {0}")]
    ReducibleSpecialFibre(String),
    #[error("exponent underflow: {0}")]
    ExponentUnderflow(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("twist mismatch: {0:?} vs {1:?}")]
    TwistMismatch((i64, i64), (i64, i64)),
    #[error("invalid twist {0:?}: need m2 >= p*m1 >= 0")]
    InvalidTwist((i64, i64)),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("genus numerator {0} is not divisible by 2")]
    NonIntegralGenus(i64),
    #[error("negative genus {0}")]
    NegativeGenus(i64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("tree fails validation: {0}")]
    InvalidTree(String),
    #[error("compatibility failure at {location}: {left} vs {right}")]
    CompatibilityFailure {
        location: String,
        left: String,
        right: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code class for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::IndeterminateAtPrecision(_) | Error::NonTerminatingBudget(_) => 3,
            Error::TotallyRamified { .. }
            | Error::RamifiedAssumptionViolated(_)
            | Error::ReducibleSpecialFibre(_)
            | Error::HypothesisViolated(_)
            | Error::NonIntegralGenus(_)
            | Error::NegativeGenus(_)
            | Error::NotPthPower
            | Error::NotInSpan
            | Error::NegativeValuation(_)
            | Error::ExponentUnderflow(_) => 4,
            Error::CompatibilityFailure { .. } | Error::InvalidTree(_) => 5,
            _ => 2,
        }
    }
}
