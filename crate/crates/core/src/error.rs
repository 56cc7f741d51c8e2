use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the public
/// operations; decisions that can legitimately go either way are encoded in
/// certificates, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not symmetric within tolerance")]
    NotSymmetric,
    #[error("family does not span its ambient space")]
    NotAFrame,
    #[error("family is not a Riesz basis (need M = N and linear independence)")]
    NotRieszBasis,
    #[error("family is not a basis of the ambient space")]
    NotABasis,
    #[error("family is not a Parseval frame")]
    NotParseval,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("need at least N vectors, got {got} in dimension {dim}")]
    TooFewVectors { got: usize, dim: usize },
    #[error("operation is not defined for complex inputs")]
    ComplexNotSupported,
    #[error("operator is singular")]
    SingularOperator,
    #[error("projection norms differ beyond tolerance")]
    NormsDiffer,
    #[error("vector {vector} does not lie in subspace {subspace}")]
    VectorsOutsideSubspace { subspace: usize, vector: usize },
    #[error("norm values are not realizable: {0}")]
    UnrealizableNorms(String),
    #[error("premise failed: {0}")]
    PremiseFailed(String),
    #[error("candidate budget of {0} draws exhausted")]
    CandidateBudgetExhausted(usize),
    #[error("construction budget of {0} attempts exhausted")]
    ConstructionBudgetExhausted(usize),
    #[error("vector count {m} outside the supported range [{lo}, {hi}]")]
    PreconditionRange { m: usize, lo: usize, hi: usize },
    #[error("subset scan of {m} vectors exceeds the guard of {guard}; pass force to lift it")]
    ScanTooLarge { m: usize, guard: usize },
    #[error("zero vector at index {0}")]
    ZeroVector(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
