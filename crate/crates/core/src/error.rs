use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is numerically singular: {0}")]
    Singular(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size guard tripped: {0}")]
    SizeGuard(String),
    #[error("scan range is empty: {0}")]
    EmptyScanRange(String),
    #[error("numerical instability: {0}")]
    Instability(String),
    #[error("oracle range exceeded: {0}")]
    OracleRange(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("factorization breakdown: {0}")]
    Factorization(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("range error: {0}")]
    Range(String),
}

impl Error {
    /// True for failures of floating-point machinery rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Singular(_)
                | Error::Instability(_)
                | Error::OracleRange(_)
                | Error::Factorization(_)
                | Error::Overflow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
