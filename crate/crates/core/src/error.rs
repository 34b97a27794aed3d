use thiserror::Error;

/// Errors produced by the library.
///
/// The variants map onto the failure classes the command-line harness
/// reports with distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of the operands do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An invalid parameter or an unusable configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Input data that cannot be processed (non-finite values, empty images).
    #[error("invalid input: {0}")]
    Input(String),

    /// A numerical kernel failed (e.g. a factorization did not converge).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[cfg(feature = "io")]
    #[error("image error: {0}")]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(what: impl Into<String>) -> Error {
    Error::Dimension(what.into())
}
