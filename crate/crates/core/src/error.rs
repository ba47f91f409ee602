use thiserror::Error;

/// Errors raised by the library.
///
/// Input errors name the offending field so the CLI can report it on one
/// line; numerical failures carry the data needed to reproduce them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    #[error("polygon rejected: {0}")]
    Polygon(String),

    #[error("point ({x}, {y}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("gradient of the norm is undefined at the origin")]
    GradientAtOrigin,

    #[error(
        "root not bracketed on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}"
    )]
    BracketFailure { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{what} failed: {reason}")]
    Numerical { what: &'static str, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput { field, reason: reason.into() }
    }

    pub(crate) fn numerical(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Numerical { what, reason: reason.into() }
    }

    /// True for errors caused by bad user input, false for numerical
    /// breakdowns.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput { .. }
                | Error::Polygon(_)
                | Error::OutsideDomain { .. }
                | Error::GradientAtOrigin
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
