use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("missing field `{0}`")]
    MissingField(String),

    #[error("invalid value for `{name}`: {reason}")]
    InvalidValue { name: String, reason: String },

    #[error("configuration parse error: {0}")]
    Parse(String),

    #[error("{what} index {index} out of range (have {len})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("location ({x}, {y}) lies outside the simulation area")]
    LocationOutsideArea { x: f64, y: f64 },

    #[error("channel table needs {required} bytes, budget is {budget}")]
    ResourceLimit { required: usize, budget: usize },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("closest BS contributes zero power; relative gain is unbounded")]
    DegenerateClosest,

    #[error("all per-BS terms are zero")]
    AllZeroTerms,

    #[error("SNR fields are defined on different grids")]
    GridMismatch,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

impl Error {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidValue {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
