use thiserror::Error;

/// Errors raised by the library. The CLI maps these onto exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("block level {level} out of range 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is numerically singular{}", level.map(|l| format!(" at level {l}")).unwrap_or_default())]
    Singular { level: Option<usize> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("conjugate symmetry violated: imaginary residue {residue:e} exceeds {tolerance:e}")]
    Symmetry { residue: f64, tolerance: f64 },

    #[error("rejection sampler acceptance rate {rate:e} below {min:e}")]
    Efficiency { rate: f64, min: f64 },

    #[error("serialization: {0}")]
    Serde(String),
}

impl Error {
    /// True for failures that come from the numerics rather than from the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Singular { .. } | Error::Accuracy(_) | Error::Symmetry { .. } | Error::Efficiency { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
