use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A prior specification, theta or other parameter is out of range.
    Config(String),
    /// An operation was called outside its contract (empty pool, too few items, ...).
    Usage(&'static str),
    /// A quantity is undefined for the given inputs, e.g. conditioning on a
    /// set that cannot be contaminated.
    NumericDomain(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
            Error::NumericDomain(msg) => write!(f, "numeric domain error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
