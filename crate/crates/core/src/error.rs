use thiserror::Error;

/// Errors produced by the diagram, measure and representation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("coordinates are not interlacing: {0}")]
    NotInterlacing(String),

    #[error("invalid continuous diagram: {0}")]
    InvalidDiagram(String),

    #[error("total mass {mass} differs from 1 by more than {tolerance}")]
    MassMismatch { mass: f64, tolerance: f64 },

    #[error("Cauchy transform evaluated on the support at real point {0}")]
    Pole(f64),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("not a permutation: {0}")]
    NotPermutation(String),

    #[error("order {order} exceeds q - 1 = {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("central function is not positive definite: mass {mass} on {partition}")]
    NotPositiveDefinite { partition: String, mass: String },

    #[error("measure is empirical; exhaustive weights are required")]
    EmpiricalMeasure,

    #[error("representation check failed: {0}")]
    InvalidRepresentation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Newton iteration did not converge at z = {z}: residuals {trace:?}")]
    NewtonFailure { z: String, trace: Vec<f64> },

    #[error("{stage}: {message}")]
    Numerical { stage: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn numerical(stage: &str, message: impl Into<String>) -> Self {
        Error::Numerical {
            stage: stage.to_string(),
            message: message.into(),
        }
    }

    /// Prefixes a numerical failure with the pipeline stage that produced it.
    pub fn in_stage(self, stage: &str) -> Self {
        match self {
            Error::Numerical { stage: inner, message } => Error::Numerical {
                stage: format!("{stage}/{inner}"),
                message,
            },
            other => Error::Numerical {
                stage: stage.to_string(),
                message: other.to_string(),
            },
        }
    }

    /// True for failures of numerical stages (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical { .. } | Error::NewtonFailure { .. } | Error::MassMismatch { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
