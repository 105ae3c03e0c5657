use thiserror::Error;

use crate::netmodel::Phase;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice must be at least 2x2, got {rows}x{cols}")]
    InvalidDimension { rows: u32, cols: u32 },

    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("network is in phase {actual:?}, operation requires {expected:?}")]
    PhaseMismatch { expected: Phase, actual: Phase },

    #[error("cannot fail {requested} elements, only {available} utilized")]
    InsufficientTargets { requested: usize, available: usize },

    #[error("no node pair at offset ({distance}, {distance}) fits a {rows}x{cols} lattice")]
    InvalidDistance { distance: u32, rows: u32, cols: u32 },

    #[error("network has no active edge")]
    NoActiveEdge,

    #[error("parameter grid is empty")]
    EmptyGrid,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
