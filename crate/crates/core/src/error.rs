use std::io;

use thiserror::Error;

/// Failures while reading a coded file. Each kind maps to its own exit code
/// in the CLI.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },
    #[error("truncated input while reading {what}")]
    Truncated { what: &'static str },
    #[error("unknown record tag 0x{0:02x}")]
    BadTag(u8),
    #[error("factor lengths sum to {actual}, header says {expected}")]
    LengthMismatch { expected: u64, actual: u64 },
    #[error("reference (src={src}, len={len}) out of bounds for n={n}")]
    OutOfBounds { src: u64, len: u64, n: u64 },
    #[error("zero-length factor at position {dst}")]
    ZeroLength { dst: u64 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("malformed coding: {0}")]
    Decode(#[from] DecodeError),
    #[error("coding is not cycle-free: {0}")]
    Cycle(String),
    #[error("internal invariant violated: {0}")]
    Logic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
