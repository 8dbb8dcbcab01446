use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    #[error("pole of the Blaschke factor at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("zero function has no normalized ratio")]
    ZeroFunction,

    #[error("no certified truncation below {tol:e} within degree {max_degree}")]
    NotConverged { tol: f64, max_degree: usize },

    #[error("linear algebra failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
