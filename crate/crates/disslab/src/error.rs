use thiserror::Error;

/// Failures reported by the library. Validation problems and numerical
/// monitors are kept apart because the command line maps them to
/// different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("integer overflow while {context}{}", .max_feasible_nu.map(|v| format!("; smallest feasible nu is about {v:.3e}")).unwrap_or_default())]
    Overflow {
        context: String,
        max_feasible_nu: Option<f64>,
    },

    #[error("truncation leak {leak:.3e} at n = {n} exceeds 1e-8; rebuild the operator on a larger mode ball")]
    TruncationLeak { leak: f64, n: usize },

    #[error("map does not satisfy the required condition: {0}")]
    Condition(String),

    #[error("matrix is defective (repeated eigenvalues); eigen coordinates are unavailable")]
    Defective,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("Kronecker classification produced a residual case: {0}")]
    KroneckerViolation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn overflow(context: impl Into<String>) -> Self {
        Error::Overflow {
            context: context.into(),
            max_feasible_nu: None,
        }
    }

    /// Exit code used by the command line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Condition(_) | Error::Json(_) => 2,
            Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
