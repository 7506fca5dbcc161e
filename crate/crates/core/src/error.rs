//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Range(String),
    #[error("element does not conform to the tower configuration: {0}")]
    Conformance(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("group is infinite: {0}")]
    InfiniteGroup(String),
    #[error("enumeration would produce {predicted} elements, above the cap {cap}")]
    CapExceeded { predicted: u128, cap: u128 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
