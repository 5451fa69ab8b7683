//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by numeric kernels, configuration validation, and
/// table parsing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside a function's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A finite result could not be represented (overflow of 2^x etc.).
    #[error("overflow: {0}")]
    Overflow(String),

    /// Series or continued fraction failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Invalid parameter combination (constructor or spec validation).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Malformed spec file or CSV table.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
