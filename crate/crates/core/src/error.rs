use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument was outside the domain of the function (non-finite,
    /// non-positive distance, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tolerance:e} within {subdivisions} subdivisions")]
    Convergence { tolerance: f64, subdivisions: usize },

    #[error("{what} index {index} out of range 1..={len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    /// The far-field approximation was requested for a geometry that does not
    /// satisfy `D >= 10 * max(R_t, R_r)`.
    #[error("far-field guard violated: distance {distance} m < 10 x radius {radius} m")]
    FarField { distance: f64, radius: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("modes {first} and {second} coincide modulo {elements}")]
    DuplicateMode {
        first: i32,
        second: i32,
        elements: usize,
    },

    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
