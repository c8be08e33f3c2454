use thiserror::Error;

/// Errors raised by state construction and the decision procedures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero-norm input: {0}")]
    ZeroNorm(String),

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("mode spaces differ between particles; identical-particle operations need equal spaces")]
    UnequalModeSpaces,

    #[error("wrong particle statistics: expected {expected}, found {found}")]
    WrongStatistics { expected: String, found: String },

    #[error("wrong particle number: expected {expected}, found {found}")]
    WrongParticleNumber { expected: String, found: usize },

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("state too large: {entries} amplitude entries exceed the cap of {cap}")]
    TooLarge { entries: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid projector: {0}")]
    InvalidProjector(String),

    #[error("factors are not one-particle orthogonal (residual {0:.3e})")]
    NotOneParticleOrthogonal(f64),

    /// Independent routes to the same answer disagreed; this is a numerical
    /// fault, not a physical outcome.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
