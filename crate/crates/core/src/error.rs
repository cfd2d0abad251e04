use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("generation exhausted after {attempts} attempts: {reason}")]
    GenerationExhausted { attempts: usize, reason: String },

    #[error("stability check failed: Courant number {courant:.4} exceeds {limit:.4}")]
    Stability { courant: f64, limit: f64 },

    #[error("dispersion check failed: {points_per_wavelength:.3} points per wavelength < {required}")]
    Dispersion {
        points_per_wavelength: f64,
        required: f64,
    },

    #[error("simulation diverged at step {step}: |P| = {amplitude:e}")]
    Diverged { step: usize, amplitude: f64 },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    Shape {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("corrupt dataset blob `{blob}`: {reason}")]
    Corruption { blob: String, reason: String },

    #[error("unsupported dataset format version {0}")]
    Version(u32),

    #[error("infeasible split: {0}")]
    Split(String),

    #[error("sample id mismatch: {0}")]
    IdMismatch(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse failure class, used by front ends to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Runtime,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Diverged { .. } | Error::Io(_) => ErrorCategory::Runtime,
            _ => ErrorCategory::Validation,
        }
    }

    /// Short machine-readable tag naming the failure.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Parameter(_) => "parameter",
            Error::GenerationExhausted { .. } => "generation-exhausted",
            Error::Stability { .. } => "stability",
            Error::Dispersion { .. } => "dispersion",
            Error::Diverged { .. } => "diverged",
            Error::Shape { .. } => "shape",
            Error::Range(_) => "range",
            Error::Corruption { .. } => "corruption",
            Error::Version(_) => "version",
            Error::Split(_) => "split",
            Error::IdMismatch(_) => "id-mismatch",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn shape(expected: &[usize], found: &[usize]) -> Self {
        Error::Shape {
            expected: expected.to_vec(),
            found: found.to_vec(),
        }
    }
}
