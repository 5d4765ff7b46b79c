use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("pole at or within 1e-6 of s = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("range error: {0}")]
    Range(String),

    #[error("accuracy not reached in {context}: achieved {achieved:.3e}, requested {requested:.3e}")]
    Accuracy {
        context: String,
        achieved: f64,
        requested: f64,
    },

    #[error("128-bit overflow while computing the coefficient at index {index}")]
    Overflow { index: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate window: {0}")]
    Degenerate(String),

    #[error("invalid cache file: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn accuracy(context: impl Into<String>, achieved: f64, requested: f64) -> Self {
        Error::Accuracy {
            context: context.into(),
            achieved,
            requested,
        }
    }
}
