//! Error type shared by all core modules.

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the core algorithms.
///
/// Every variant names the module boundary it comes from; the CLI layer
/// renders these as one-line diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A corpus or training set was empty where at least one document is required.
    EmptyCorpus,
    /// A zero-length document was passed to an operation that needs tokens.
    EmptyDocument,
    /// The synthetic generator cannot fit the requested class signals.
    VocabTooSmall { needed: usize, got: usize },
    /// A label name is not part of the task's label set.
    UnknownLabel(String),
    /// A label in the task has no training example.
    LabelUnseen(String),
    /// A feature-vector or array dimension does not match the model.
    DimensionMismatch { expected: usize, got: usize },
    /// An input exceeds the model's positional-embedding table.
    PositionOverflow { len: usize, max: usize },
    /// A sequence handed to the attention layer does not start with CLS.
    MissingCls,
    /// A configuration value violates a documented constraint.
    InvalidConfig(String),
    /// A forward or backward pass produced a non-finite value.
    NumericalDivergence(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyCorpus => write!(f, "empty corpus"),
            Error::EmptyDocument => write!(f, "zero-length document"),
            Error::VocabTooSmall { needed, got } => write!(
                f,
                "vocabulary too small for class signals (need >= {needed}, got {got})"
            ),
            Error::UnknownLabel(name) => write!(f, "unknown label {name:?}"),
            Error::LabelUnseen(name) => {
                write!(f, "label {name:?} has no example in the training data")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::PositionOverflow { len, max } => {
                write!(f, "input exceeds max_positions (length {len}, max {max})")
            }
            Error::MissingCls => write!(f, "sequence does not start with CLS"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::NumericalDivergence(msg) => write!(f, "numerical divergence: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
