use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MooError {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid value: {0}")]
    Validation(String),
    #[error("objective {index} is below the nadir point ({value} < {nadir})")]
    NadirViolation { index: usize, value: f64, nadir: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("archive error: {0}")]
    Archive(String),
}

impl MooError {
    pub(crate) fn dim(context: &'static str, expected: usize, got: usize) -> Self {
        MooError::Dimension {
            context,
            expected,
            got,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        MooError::Validation(msg.into())
    }
}

pub type Result<T, E = MooError> = std::result::Result<T, E>;

pub(crate) fn ensure_finite(what: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(MooError::NonFinite(what.to_string()))
    }
}

pub(crate) fn ensure_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(MooError::dim(context, expected, got))
    }
}
