use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: dimension mismatch between {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{op}: expected a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not Hermitian: max |m - m†| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("map is not completely positive: Choi eigenvalue {min_eigenvalue:e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("{what} is not unitary: |U†U - I| = {deviation:e}")]
    NotUnitary { what: &'static str, deviation: f64 },

    #[error("state vector is not normalized: norm {norm}")]
    NotUnitVector { norm: f64 },

    #[error("not maximum Schmidt number: coefficient {index} is {value}")]
    NotMaxSchmidtNumber { index: usize, value: f64 },

    #[error("Schmidt coefficient {value:e} is below {min:e}; block rescaling is ill-conditioned")]
    IllConditioned { value: f64, min: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown channel '{name}', expected one of: {}", valid.join(", "))]
    UnknownChannel {
        name: String,
        valid: Vec<&'static str>,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),
}
