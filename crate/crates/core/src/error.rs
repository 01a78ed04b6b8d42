use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a function (poles, x <= 0, ...).
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// Invalid (n, gamma) or other configuration parameters.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Shape or size mismatch between operands.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An iterative or adaptive method failed to reach its tolerance.
    #[error("{method} did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    NonConvergence {
        method: &'static str,
        achieved: f64,
        requested: f64,
    },

    /// A numeric procedure broke down for a reason other than slow convergence.
    #[error("numeric failure in {method}: {detail}")]
    Numeric { method: &'static str, detail: String },

    #[error("i/o error on {path}: {detail}")]
    Io { path: String, detail: String },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// True for errors that the CLI reports as numeric non-convergence.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::Numeric { .. })
    }
}
