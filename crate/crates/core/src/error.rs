use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("zero vector not allowed: {0}")]
    ZeroVector(&'static str),
    #[error("expected a unit vector, norm is {0}")]
    NotUnit(f64),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("operator norm {0} is not 1")]
    NormNotOne(f64),
    #[error("operator norm {0} exceeds 1, not a contraction")]
    NotContraction(f64),
    #[error("operator is an isometry, no non-extremeness witness exists")]
    IsometryHasNoWitness,
    #[error("space is strictly convex")]
    StrictlyConvex,
    #[error("refused: {0}")]
    Refused(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Stable machine-readable code used in CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidSpace(_) => "invalid_space",
            Error::InvalidOperator(_) => "invalid_operator",
            Error::ZeroVector(_) => "zero_vector",
            Error::NotUnit(_) => "not_unit",
            Error::Hypothesis(_) => "hypothesis_violation",
            Error::NormNotOne(_) => "norm_not_one",
            Error::NotContraction(_) => "not_contraction",
            Error::IsometryHasNoWitness => "isometry_has_no_witness",
            Error::StrictlyConvex => "strictly_convex",
            Error::Refused(_) => "refused",
            Error::Unsupported(_) => "unsupported",
            Error::Numerical(_) => "numerical_failure",
        }
    }

    /// Numerical failures are internal; everything else is an input problem.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}
