use thiserror::Error;

/// Errors produced by the watermarking pipeline and its support modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Image or block geometry violates a contract (block multiple, size match).
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    /// Matrix or vector shapes do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// NaN or infinity where only finite values are allowed.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Extraction divides recovered scores by alpha; alpha = 0 is undefined.
    #[error("alpha must be > 0 for extraction")]
    ZeroAlpha,

    /// Normalized correlation of an all-zero bit vector divides by zero.
    #[error("normalized correlation undefined: bit vector is all zeros")]
    UndefinedNc,

    /// Malformed input text (attack spec, image file, model file).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
