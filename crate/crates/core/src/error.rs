use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The metric failed its Cholesky factorization.
    #[error("metric is not positive definite: smallest eigenvalue {eigenvalue:e}")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis of an estimate or corollary does not hold on the input,
    /// so no verdict can be issued.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("contract error: {0}")]
    Contract(String),

    #[error("unsupported weight: {0}")]
    UnsupportedWeight(String),

    #[error("integrator failure at r = {r}: {reason}")]
    Integrator { r: f64, reason: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn hypothesis(msg: impl Into<String>) -> Self {
        Error::HypothesisViolated(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
