use alloc::vec::Vec;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument {
        name: &'static str,
        reason: &'static str,
    },

    #[error("length mismatch: expected {expected} elements, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("layout has no {0} node")]
    MissingNode(&'static str),

    #[error("scheme `{scheme}` is incompatible with the supplied layout or channels: {reason}")]
    SchemeMismatch {
        scheme: &'static str,
        reason: &'static str,
    },

    #[error("scheme `{0}` needs a phase optimizer")]
    MissingOptimizer(&'static str),

    #[error("fitness returned non-finite value {value} at phases {phases:?}")]
    NonFiniteFitness { value: f64, phases: Vec<f64> },

    #[error("unknown {kind} `{code}`")]
    UnknownCode { kind: &'static str, code: alloc::string::String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidArgument { name, reason }
    }
}
