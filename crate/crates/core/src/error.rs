use thiserror::Error;

/// Errors produced by the phase-space toolbox.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QhaError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("grid point ({m}, {n}) outside the {d}x{d} phase grid")]
    InvalidGridPoint { m: usize, n: usize, d: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("dataset has zero total energy")]
    ZeroEnergy,

    #[error("dataset is not normalized: sum of squared norms is {0}")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (defect {defect:e}, allowed {allowed:e})")]
    NotHermitian { defect: f64, allowed: f64 },

    #[error("operator is not positive: eigenvalue {eigenvalue:e} below -{tolerance:e}")]
    NotPositive { eigenvalue: f64, tolerance: f64 },

    #[error("trace must be 1, got {0}")]
    TraceNotOne(f64),

    #[error("eigenvalue {0} outside [0, 1]")]
    EigenvalueOutOfRange(f64),

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("grid function takes negative value {0:e}")]
    NegativeDensity(f64),

    #[error("grid function has mass {0}, expected 1")]
    NotProbability(f64),

    #[error("domain is empty")]
    EmptyDomain,

    #[error("domain does not fit the torus: {0}")]
    DomainTooLarge(String),

    #[error("augmentation would produce {requested} signals (limit {limit})")]
    AugmentationTooLarge { requested: usize, limit: usize },

    #[error("degenerate construction: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, QhaError>;

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(QhaError::DimensionMismatch { expected, actual })
    }
}
