use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the estimation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    /// The LS system has (numerically) deficient rank. For random benchmark
    /// designs this means an unlucky draw.
    #[error("singular system: pivot ratio {ratio:.3e} below tolerance {tolerance:.1e}")]
    SingularSystem { ratio: f64, tolerance: f64 },

    #[error("reflection coefficient {index} has modulus {modulus}, expected 1")]
    InvalidReflection { index: usize, modulus: f64 },

    #[error("Zadoff-Chu root {omega} is not coprime to length {len}")]
    InvalidRoot { omega: u64, len: usize },

    #[error("pilot length {n} is shorter than L(M+1) = {required}")]
    InsufficientLength { n: usize, required: usize },

    #[error("accumulated channel power is zero")]
    DegenerateChannel,

    #[error("{scheme}: gave up after {retries} redraws of a singular training design")]
    RetriesExhausted { scheme: String, retries: usize },

    /// Scenario file could not be parsed or failed validation.
    #[error("{path}{}: {message}", line.map(|l| format!(":{l}")).unwrap_or_default())]
    Scenario {
        path: PathBuf,
        line: Option<usize>,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
