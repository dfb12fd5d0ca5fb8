//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the numerical kernels and the operator-theory layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} ({left} vs {right})")]
    DimensionMismatch {
        context: &'static str,
        left: String,
        right: String,
    },

    #[error("iteration did not converge after {iterations} steps in {what}")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("matrix is numerically singular (pivot {pivot:.3e} below scale {scale:.3e})")]
    Singular { pivot: f64, scale: f64 },

    #[error("subspaces are not an algebraic complement (smallest stacked singular value {sigma_min:.3e})")]
    NotComplementary { sigma_min: f64 },

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("matrix is not idempotent: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotIdempotent { residual: f64, tol: f64 },

    #[error("degenerate geometry: {detail}")]
    DegenerateGeometry { detail: String },

    #[error("contour passes too close to the spectrum (distance {distance:.3e}, required {required:.3e})")]
    ContourTooClose { distance: f64, required: f64 },

    #[error("contour quadrature did not converge (node-doubling delta {delta:.3e})")]
    QuadratureNotConverged { delta: f64 },

    #[error("no usable spectral gap around target ({detail})")]
    NoSpectralGap { detail: String },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("spectrum strays from the expected set by {deviation:.3e}")]
    SpectrumViolation { deviation: f64 },

    #[error("matrix is not an eps-idempotent: residual {residual:.3e} exceeds {eps_max:.3e}")]
    NotNearIdempotent { residual: f64, eps_max: f64 },

    #[error("pair is not eps-commuting: commutator norm {norm:.3e} exceeds {delta:.3e}")]
    NotEpsCommuting { norm: f64, delta: f64 },

    #[error("could not extract a nontrivial invariant subspace from the pipeline output")]
    ExtractionFailed,

    #[error("certification failed: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Certification { residual: f64, tol: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown trial suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn dim(context: &'static str, left: impl ToString, right: impl ToString) -> Self {
        Error::DimensionMismatch {
            context,
            left: left.to_string(),
            right: right.to_string(),
        }
    }
}
