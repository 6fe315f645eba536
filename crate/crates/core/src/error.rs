use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the domain of an operation (bad vertex, loop, empty set...).
    #[error("invalid input: {0}")]
    Domain(String),
    /// A theorem hypothesis required by the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A constructed object failed its own post-check. Indicates a bug.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("search budget exhausted after {nodes} nodes")]
    Budget { nodes: u64 },
    #[error("cancelled")]
    Cancelled,
    #[error("subset enumeration refused for n = {n} (limit {limit})")]
    SizeGuard { n: usize, limit: usize },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
