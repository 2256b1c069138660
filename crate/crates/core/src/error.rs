use std::fmt;

use thiserror::Error;

/// Which side of a validity interval was crossed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Lower => f.write_str("lower"),
            Bound::Upper => f.write_str("upper"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{quantity} = {value} violates the {bound} bound {limit}")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        bound: Bound,
        limit: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid profile: {0}")]
    Profile(String),

    #[error("invalid spectrum: {0}")]
    Spectrum(String),

    #[error("axis is not uniformly spaced; resample onto a uniform grid before convolving")]
    NonUniformAxis,

    #[error("no {level} crossing found on the {side} side of the peak")]
    NoCrossing { level: &'static str, side: &'static str },

    #[error("pump envelope is not resolved on its axis: {0}")]
    Normalization(String),

    #[error("grid does not cover the pump support: {0}")]
    Support(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn below(quantity: &'static str, value: f64, limit: f64) -> Self {
        Error::OutOfRange { quantity, value, bound: Bound::Lower, limit }
    }

    pub(crate) fn above(quantity: &'static str, value: f64, limit: f64) -> Self {
        Error::OutOfRange { quantity, value, bound: Bound::Upper, limit }
    }

    pub(crate) fn from_csv(e: csv::Error, fallback_line: usize) -> Self {
        let line = e.position().map(|p| p.line() as usize).unwrap_or(fallback_line);
        Error::Parse { line, message: e.to_string() }
    }

    /// True for errors caused by malformed input files rather than failed computations.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Config(_) | Error::Json(_))
    }
}

/// Checks `lo <= value <= hi`, naming the violated bound.
pub(crate) fn check_range(quantity: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !(value >= lo) {
        return Err(Error::below(quantity, value, lo));
    }
    if !(value <= hi) {
        return Err(Error::above(quantity, value, hi));
    }
    Ok(())
}
