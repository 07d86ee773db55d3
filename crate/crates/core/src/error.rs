use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("enumeration of {count} strategies exceeds the budget of {budget}")]
    Resource { count: u128, budget: u64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Numeric { iterations: usize, residual: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
