use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants map one-to-one onto the failure modes of the public
/// operations, so callers (and the CLI) can tell a malformed input apart
/// from a detected mathematical violation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max |M - M^dag| = {deviation:.3e})")]
    Hermiticity { deviation: f64 },

    #[error("normalization violated: {0}")]
    Normalization(String),

    #[error("density matrix trace is {trace:.17e}, expected 1")]
    Trace { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.6e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("Kraus completeness violated (max |sum K^dag K - I| = {residual:.3e})")]
    Completeness { residual: f64 },

    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:.6e})")]
    CompletePositivity { min_eigenvalue: f64 },

    #[error("map is not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("superoperator does not preserve Hermiticity (residual {residual:.3e})")]
    NotHermiticityPreserving { residual: f64 },

    #[error("generator is not completely positive: coefficient matrix has eigenvalue {min_eigenvalue:.6e}")]
    NotCompletelyPositiveGenerator { min_eigenvalue: f64 },

    #[error("columns are not orthonormal (max Gram deviation {deviation:.3e})")]
    Isometry { deviation: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid time grid: {0}")]
    Grid(String),

    #[error("amplitude c1 vanishes at t = {t} (|c1| = {modulus:.3e}); decay rates diverge")]
    AmplitudeZero { t: f64, modulus: f64 },

    #[error("parameters outside the formula's regime: {0}")]
    Regime(String),

    #[error("matrix is singular")]
    Singular,

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
