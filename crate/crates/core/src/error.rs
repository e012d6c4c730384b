use thiserror::Error;

/// Errors produced by state construction, operator algebra, and the
/// capacity / entanglement routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian: max |m - m^H| entry {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("trace is {trace:.17e}, expected 1 within {tolerance:.3e}")]
    TraceNotOne { trace: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("eigenvalue {eigenvalue:.17e} exceeds 1 beyond tolerance")]
    EigenvalueAboveOne { eigenvalue: f64 },

    #[error("matrix is not unitary: max |U^H U - I| entry {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("operation requires a composite state, got a single system of dimension {dim}")]
    NotComposite { dim: usize },

    #[error("coefficients outside state space: min eigenvalue {min_eigenvalue:.3e}")]
    OutsideStateSpace { min_eigenvalue: f64 },

    #[error("probabilities must be non-negative and sum to 1, got sum {sum:.17e}")]
    InvalidProbabilities { sum: f64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("support violation: {leak:.3e} of the state's mass lies outside the reference support")]
    SupportViolation { leak: f64 },

    #[error("cross-check failed: {context} disagree by {residual:.3e}")]
    CrossCheckFailed { context: String, residual: f64 },

    #[error("dimension {dim} exceeds the cap {cap} for {context}")]
    DimensionCap {
        dim: usize,
        cap: usize,
        context: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
