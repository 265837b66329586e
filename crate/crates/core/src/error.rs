use thiserror::Error;

/// Errors raised by the numerical routines and the batch front-end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical degeneracy: {0}")]
    Degenerate(String),

    #[error("data not strictly positive: circle margin {margin:.3e} below floor {floor:.3e}")]
    NotStrictlyPositive { margin: f64, floor: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("phase step {step:.3} rad too coarse to count windings; refine the sampling")]
    Resolution { step: f64 },

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unreliable certificate: factor residual {residual:.3e} above {tol:.3e}")]
    UnreliableCertificate { residual: f64, tol: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used in JSON diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Degenerate(_) => "degenerate",
            Error::NotStrictlyPositive { .. } => "not_strictly_positive",
            Error::Convergence { .. } => "convergence",
            Error::Resolution { .. } => "resolution",
            Error::Domain(_) => "domain",
            Error::Precondition(_) => "precondition",
            Error::UnreliableCertificate { .. } => "unreliable_certificate",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Degenerate(_)
                | Error::NotStrictlyPositive { .. }
                | Error::Convergence { .. }
                | Error::Resolution { .. }
                | Error::UnreliableCertificate { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
