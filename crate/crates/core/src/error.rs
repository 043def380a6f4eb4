use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value: {0}")]
    NonFinite(&'static str),

    #[error("pixel ({i}, {j}) out of bounds for {px_w}x{px_h} grid")]
    PixelOutOfBounds {
        i: usize,
        j: usize,
        px_w: usize,
        px_h: usize,
    },

    #[error("point lies outside the grid window")]
    OutOfWindow,

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("only {valid} valid sample pairs (need at least 10)")]
    InsufficientSamples { valid: usize },

    #[error("mask has no bounded cells")]
    EmptyMask,

    #[error("only {found} box sizes available (need at least 3)")]
    InsufficientScales { found: usize },

    #[error("comparison undefined: both masks are empty")]
    Undefined,

    #[error("grid dimensions differ: {0}x{1} vs {2}x{3}")]
    GridMismatch(usize, usize, usize, usize),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
