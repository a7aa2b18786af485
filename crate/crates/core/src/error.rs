use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice size n = {n}: need n >= {min}")]
    InvalidLattice { n: usize, min: usize },

    #[error("invalid smoothness alpha = {0}: must be greater than 1/2")]
    InvalidSmoothness(f64),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid CAR specification: {0}")]
    InvalidSpec(String),

    #[error("first row is not symmetric: entry {index} differs from entry n - {index}")]
    NotSymmetric { index: usize },

    #[error("lag {lag} out of range for lattice of size {n}")]
    LagOutOfRange { lag: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("covariance is not positive semidefinite: eigenvalue {value:e} at frequency {index}")]
    NotPositiveSemidefinite { index: usize, value: f64 },

    #[error("series truncation needs {needed:e} terms, more than the cap of {cap}")]
    TruncationCap { needed: f64, cap: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Numerical failures (as opposed to rejected parameters).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular | Error::NotPositiveSemidefinite { .. } | Error::TruncationCap { .. }
        )
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be positive and finite",
        })
    }
}
