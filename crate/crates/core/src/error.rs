//! Error type shared by all modules.
//!
//! The variants are grouped so a driver can map them onto coarse exit codes:
//! parameter misuse, grid/band-limit problems, and verification failures are
//! kept distinct.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid scalar parameter (exponent out of range, nonpositive time, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The grid cannot represent the requested object (Nyquist too low,
    /// turning point outside the window, ...).
    #[error("band-limit error: {0}")]
    BandLimit(String),

    /// Structural grid problem: mismatched grids, odd N where even is
    /// required, wrong dimension, missing self-duality.
    #[error("grid error: {0}")]
    Grid(String),

    /// Odd ambient dimension where `R^{2d}` structure is required.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Non-finite samples or malformed field data.
    #[error("data error: {0}")]
    Data(String),

    /// Requested basis index outside the constructed catalog.
    #[error("catalog error: {0}")]
    Catalog(String),

    /// Spectral truncation residual above the caller's tolerance.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// Kernel route evaluated at a singular time (t in pi*Z).
    #[error("singular-time error: {0}")]
    SingularTime(String),

    /// A verification suite recorded a failing residual.
    #[error("verification failure: {0}")]
    Verification(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed header or manifest.
    #[error("format error: {0}")]
    Format(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Coarse exit-code class used by command-line drivers:
    /// 2 = parameter error, 3 = band-limit/grid error, 4 = verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Data(_) | Error::Format(_) => 2,
            Error::BandLimit(_)
            | Error::Grid(_)
            | Error::Dimension(_)
            | Error::Catalog(_)
            | Error::Truncation(_)
            | Error::SingularTime(_) => 3,
            Error::Verification(_) => 4,
            Error::Io(_) => 2,
        }
    }
}
