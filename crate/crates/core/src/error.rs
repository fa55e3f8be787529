use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("stencils need at least {required} spatial cells, mesh has {actual}")]
    MeshTooSmall { required: usize, actual: usize },

    /// The density does not integrate to the background density on the torus.
    #[error("Poisson compatibility violated: net charge {net:e} exceeds tolerance {tolerance:e}")]
    SolvabilityViolation { net: f64, tolerance: f64 },

    #[error("time step {dt:e} exceeds the {scheme} stability bound {bound:e}")]
    StabilityViolation {
        scheme: &'static str,
        dt: f64,
        bound: f64,
    },

    #[error("non-finite density in window {window} at iteration {iteration}")]
    NonFiniteState { window: usize, iteration: usize },

    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("missing column `{column}` in {file}")]
    MissingColumn { file: String, column: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
        if expected == actual {
            Ok(())
        } else {
            Err(Error::ShapeMismatch { expected, actual })
        }
    }
}
