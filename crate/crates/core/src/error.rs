//! Error types shared across the engine.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A game-parameter invariant is violated (e.g. `c_F >= c_I`).
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// An operation argument is out of range (e.g. `dt <= 0`).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An integration step left the unit cube by more than the clamping
    /// tolerance, which signals a step size too large for the dynamics.
    #[error(
        "numerical instability at t = {t}: coordinate {coord} = {value} \
         exceeds the unit cube by more than {tol}; reduce the step size"
    )]
    StepInstability {
        t: f64,
        coord: &'static str,
        value: f64,
        tol: f64,
    },

    /// The operation is defined only for the built-in scenarios.
    #[error("unsupported scenario: {0}")]
    UnsupportedScenario(String),

    /// The config file could not be parsed. The message carries the
    /// line/column reported by the TOML parser, and names unknown keys.
    #[error("config parse error in {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    /// The config file parsed but violates an invariant.
    #[error("config validation error: {0}")]
    ConfigValidation(String),

    /// An I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
