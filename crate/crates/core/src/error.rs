use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} out of range: {value} (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("width mismatch: {0}")]
    WidthMismatch(String),

    #[error("malformed gate: {0}")]
    MalformedGate(String),

    #[error("register map mismatch: {0}")]
    RegisterMismatch(String),

    #[error("ancilla pool exhausted: needed {needed}, available {available}")]
    AncillaExhausted { needed: usize, available: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_range(what: &'static str, value: usize, limit: usize) -> Result<()> {
    if value >= limit {
        return Err(Error::OutOfRange { what, value, limit });
    }
    Ok(())
}
