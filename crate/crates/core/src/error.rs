use alloc::string::String;

use crate::gaussian::ModeId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("mode `{0}` already present")]
    DuplicateMode(ModeId),
    #[error("mode `{0}` not present")]
    UnknownMode(ModeId),
    #[error("parameter `{name}` = {value} outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("unphysical state: {0}")]
    Unphysical(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("solver did not converge (best residual {best_residual:e})")]
    NoConvergence { best_residual: f64 },
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            expected,
        }
    }
}

/// Rejects `value` unless `ok` holds (NaN never passes).
pub(crate) fn ensure(ok: bool, name: &'static str, value: f64, expected: &'static str) -> crate::Result<()> {
    if ok && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(name, value, expected))
    }
}
