use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("quantum integer [{0}] is undefined for negative arguments")]
    NegativeQuantumInt(i64),
    #[error("coefficient {0} is not an integer")]
    NonIntegral(String),
    #[error("t = 0 substituted into t^{0}")]
    ZeroToNegativePower(i64),
    #[error("coefficient {0} does not fit in 64 bits")]
    CoefficientOverflow(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("catalog incomplete: {0}")]
    CatalogIncomplete(String),
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("d^2 != 0 at degree {degree}: {detail}")]
    D2Violation { degree: i64, detail: String },
    #[error("entry ({row}, {col}) of the differential at degree {degree} is not an identity pivot")]
    NotAPivot { degree: i64, row: usize, col: usize },
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("complex is not reduced: {0}")]
    NotReduced(String),
    #[error("invalid braid: {0}")]
    InvalidBraid(String),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
