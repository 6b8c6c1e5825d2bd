//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by the propagation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside an operation's mathematical domain (non-positive
    /// frequency, distance, thickness, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid or inconsistent configuration (non-primitive PN polynomial,
    /// RF center outside the passband, bad slide factor, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Lookup outside a table's covered range; tables never extrapolate.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Sample geometry cannot identify the requested model parameters.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Received signal below the sounder's measurable range.
    #[error("below sensitivity: {0}")]
    BelowSensitivity(String),

    /// Link cannot close even at the reference distance.
    #[error("no coverage: {0}")]
    NoCoverage(String),

    /// Not enough input data to complete the operation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Channel tap delay wraps past one PN period.
    #[error("unsupported aliasing: {0}")]
    Aliasing(String),

    /// Malformed input file, record, or report request.
    #[error("schema error: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
