use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("requested cutoff {requested} exceeds the supported maximum {max}")]
    Capacity { requested: usize, max: usize },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("recurrence is not normalizable: amplitudes diverge from index {index}")]
    NonNormalizable { index: usize },

    #[error("{method} did not converge: {detail}")]
    Convergence { method: &'static str, detail: String },

    #[error("state file: {0}")]
    Schema(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            domain,
        }
    }
}
