use thiserror::Error;

/// Errors raised by chain, form and norm operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ChainletError {
    #[error("grade exceeds ambient dimension (grade {grade}, ambient {ambient})")]
    GradeOverflow { grade: usize, ambient: usize },

    #[error("ambient dimension {0} is outside the supported range 1..=12")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate cell: {0}")]
    DegenerateCell(String),

    #[error("frame is not orthonormal")]
    NonOrthonormalFrame,

    #[error("refinement requires dyadic cells")]
    NonDyadic,

    #[error("simplex does not lie in a coordinate plane")]
    NonAxisPlane,

    #[error("certificate does not recompose chain (discrepancy {discrepancy:e})")]
    CertificateMismatch { discrepancy: f64 },

    #[error("dictionary form `{0}` has no exact norm")]
    MissingExactNorm(String),

    #[error("exact norms must be nondecreasing in r")]
    DecreasingNorms,

    #[error("analytic derivative fails the Stokes self-check (discrepancy {discrepancy:e})")]
    InconsistentDerivative { discrepancy: f64 },

    #[error("quadrature did not converge: partial value {partial}, error estimate {error_estimate:e}")]
    NonConvergence { partial: f64, error_estimate: f64 },

    #[error("convergence fit needs at least 3 levels, got {0}")]
    TooFewLevels(usize),

    #[error("level {0} is missing from the chainlet sequence")]
    MissingLevel(u32),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, ChainletError>;
