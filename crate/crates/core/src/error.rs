use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} must be {requirement} (got {value})")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("chain length must satisfy {requirement} (got {n})")]
    InvalidChainLength { n: usize, requirement: &'static str },

    #[error("element ({0},{1}) lies outside the X pattern")]
    OutsideXPattern(usize, usize),

    #[error("state is not X-shaped: entry ({row},{col}) has modulus {modulus:e}")]
    NotXState {
        row: usize,
        col: usize,
        modulus: f64,
    },

    #[error("correlation matrix is not diagonal (largest off-diagonal entry {0:e})")]
    NonDiagonalCorrelations(f64),

    #[error("grid resolution must be at least {min} (got {got})")]
    GridTooCoarse { got: usize, min: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("operation needs a one-dimensional uniform sweep: {0}")]
    NotOneDimensional(String),

    #[error("no critical point: largest |derivative| is {0:e}")]
    NoCriticalPoint(f64),

    #[error("unsupported boundary plane ({0}, {1})")]
    UnsupportedPlane(String, String),

    #[error("unknown preset '{name}' (available: {available})")]
    UnknownPreset { name: String, available: String },

    #[error("threshold epsilon must be positive and finite (got {0})")]
    InvalidEpsilon(f64),
}
