use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("bit at index {index} is {value}, expected +1 or -1")]
    InvalidBit { index: usize, value: i64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is singular or ill-conditioned: {0}")]
    IllConditioned(&'static str),

    #[error("exhaustive search over {bits} bits exceeds the limit of {limit}")]
    InstanceTooLarge { bits: usize, limit: usize },

    #[error("invalid experiment field `{field}`: {reason}")]
    InvalidSpec { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dims_mismatch(
    context: &'static str,
    expected: impl ToString,
    actual: impl ToString,
) -> Error {
    Error::DimensionMismatch {
        context,
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}
