use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("size limit exceeded: {what} is {size}, limit {limit}")]
    Size {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("matrix is not positive semidefinite (pivot {pivot:.3e} at row {row})")]
    NotPsd { row: usize, pivot: f64 },

    #[error("strategy {0} is not applicable: {1}")]
    Inapplicable(&'static str, String),

    #[error("linear program: {0}")]
    Lp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn instance(msg: impl Into<String>) -> Self {
        Error::InvalidInstance(msg.into())
    }
}
