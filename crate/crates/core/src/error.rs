use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("point {modulus} lies inside the excluded disk of radius {radius}")]
    OutsideDomain { modulus: f64, radius: f64 },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("orbit does not escape within {budget} iterations")]
    NotEscaping { budget: usize },

    #[error("pixel ({i}, {j}) outside resolution {width}x{height}")]
    PixelOutOfRange {
        i: usize,
        j: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid slice: {0}")]
    InvalidSlice(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid tolerance policy: {0}")]
    InvalidTolerance(String),

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("unknown verification suite: {0}")]
    UnknownSuite(String),

    #[error("worker pool: {0}")]
    Workers(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
