use thiserror::Error;

/// Errors raised by the planning library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// A user-facing parameter failed validation.
    #[error("invalid value for `{field}`: {detail}")]
    InvalidInput { field: &'static str, detail: String },

    /// Evaluation would lose all precision (or divide by an underflowed value).
    #[error("numerical instability in {func}: {detail}")]
    Instability { func: &'static str, detail: String },

    /// A sign change could not be located for a root finder.
    #[error("root of {what} not bracketed on [{lo:e}, {hi:e}]")]
    NotBracketed { what: &'static str, lo: f64, hi: f64 },

    /// Iteration cap reached without meeting the tolerance.
    #[error("{what} did not converge after {iterations} iterations (last iterate {last:e}, residual {residual:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        last: f64,
        residual: f64,
    },

    /// The constraint set is empty (e.g. the budget cannot buy one unit and one inspection).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Fisher information is not positive definite.
    #[error("singular Fisher information: {0}")]
    SingularInformation(String),

    /// A degradation increment is zero, so the likelihood is undefined.
    #[error(
        "zero degradation increment for unit `{unit}` at time {time}; choose a larger minimum inspection interval"
    )]
    ZeroIncrement { unit: String, time: f64 },

    /// A dataset failed structural validation.
    #[error("invalid dataset: {0}")]
    Dataset(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(field: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidInput {
            field,
            detail: detail.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numeric_failure(&self) -> bool {
        matches!(
            self,
            Error::Instability { .. }
                | Error::NotBracketed { .. }
                | Error::NoConvergence { .. }
                | Error::SingularInformation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
