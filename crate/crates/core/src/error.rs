use thiserror::Error;

/// Errors raised by group arithmetic, sequence handling and the searches.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invariant factors violate the divisibility chain: {prev} does not divide {next}")]
    ChainViolation { prev: u32, next: u32 },
    #[error("invariant factor {0} is smaller than 2")]
    BadFactor(i64),
    #[error("element has {got} residues but the group has rank {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the zero element is not allowed here")]
    ZeroElement,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("the given elements do not form a basis")]
    NotABasis,
    #[error("group order {order} exceeds the configured cap {cap}")]
    CapExceeded { order: usize, cap: usize },
    #[error("syntax error: {0}")]
    SyntaxError(String),
    #[error("group mismatch: expected {expected}, got {got}")]
    GroupMismatch { expected: String, got: String },
    #[error("sequence is not a zero-sum sequence")]
    NotZeroSum,
    #[error("not a minimal zero-sum sequence of maximal length: {0}")]
    NotMlMzss(String),
    #[error("invalid witness: {0}")]
    BadWitness(String),
    #[error("invalid witness: s != 1 requires m*g1 = m*g2")]
    MissingCosetCondition,
    #[error("bad length: expected {expected}, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("group {0} is not of the form C_m + C_mn with m >= 2")]
    NotRankTwo(String),
}

pub type Result<T> = std::result::Result<T, Error>;
