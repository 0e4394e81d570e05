use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A point was requested outside the sampled range of a grid.
    #[error("range error: x = {x} outside [{lo}, {hi}]")]
    Range { x: f64, lo: f64, hi: f64 },

    /// An iterative or adaptive method failed to reach its tolerance.
    #[error("numeric error: {what} (residual estimate {residual:e})")]
    Numeric { what: String, residual: f64 },

    /// A grid is too coarse or too short to represent the state faithfully.
    #[error("resolution error: {reason}; maximum faithful |p| = {max_faithful_p}")]
    Resolution { reason: String, max_faithful_p: f64 },

    /// The full-line bin sum could not be closed below the truncation threshold.
    #[error("truncation error: uncovered mass {achieved_tail:e} after {bins} bins")]
    Truncation { achieved_tail: f64, bins: usize },

    /// The tail region carries no mass, so conditional tail statistics are undefined.
    #[error("degenerate tail: mass {tail_mass:e} is below the truncation threshold")]
    DegenerateTail { tail_mass: f64 },

    /// A variance that must be positive vanished.
    #[error("degenerate density: {0}")]
    Degenerate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
