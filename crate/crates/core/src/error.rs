use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced anywhere in the codec.
///
/// Variants are grouped by class so callers (and the CLI exit codes) can
/// tell caller mistakes, malformed files and I/O apart.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an operation's arguments did not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("bit length {0} outside 1..=16")]
    InvalidBitLength(u32),

    #[error("unsupported bit depth {0} (expected 8, 12 or 16)")]
    UnsupportedDepth(u32),

    #[error("pixel value {value} exceeds the {depth}-bit range")]
    PixelOutOfRange { value: u32, depth: u8 },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),

    #[error("unexpected end of data while reading {0}")]
    Truncated(&'static str),

    #[error("malformed data: {0}")]
    Malformed(String),

    #[error("layer {layer}: {detail}")]
    DimMismatch { layer: String, detail: String },

    #[error("layer order: expected {expected}, found {found}")]
    LayerOrder { expected: String, found: String },

    #[error("weights hash {actual:016x} does not match expected {expected:016x}")]
    HashMismatch { expected: u64, actual: u64 },

    #[error("corrupt entropy-coded stream: {0}")]
    CorruptStream(String),

    #[error("corrupt container: {0}")]
    CorruptContainer(String),

    #[error("image format: {0}")]
    ImageFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// Stable numeric code per error kind.
    pub fn code(&self) -> u8 {
        match self {
            Error::Contract(_) => 10,
            Error::InvalidBitLength(_) => 11,
            Error::UnsupportedDepth(_) => 12,
            Error::PixelOutOfRange { .. } => 13,
            Error::BadMagic { .. } => 20,
            Error::UnsupportedVersion(_) => 21,
            Error::Truncated(_) => 22,
            Error::Malformed(_) => 26,
            Error::DimMismatch { .. } => 23,
            Error::LayerOrder { .. } => 24,
            Error::HashMismatch { .. } => 25,
            Error::CorruptStream(_) => 30,
            Error::CorruptContainer(_) => 31,
            Error::ImageFormat(_) => 40,
            Error::Io(_) => 50,
        }
    }
}
