use thiserror::Error;

/// Errors raised by bound formulas, chain analysis and file ingestion.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the formula it feeds.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    /// Condition (B3) fails: the level `d` must exceed `2L/(1-eta)`.
    #[error("condition (B3) violated: d = {d} must exceed 2L/(1-eta) = {threshold}")]
    B3Violated { d: f64, threshold: f64 },

    /// The step-size condition required by the MALA floors fails.
    #[error("step-size condition violated: h*M = {hm} must be {requirement}; increase n")]
    StepSize { hm: f64, requirement: &'static str },

    #[error("invalid transition matrix: {0}")]
    InvalidChain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("chain has {classes} closed communicating classes; the stationary law is not unique")]
    NonUniqueStationary { classes: usize },

    #[error("chain is not reversible with respect to the supplied law")]
    NotReversible,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("{states} states exceeds the limit of {limit} for this operation")]
    TooLarge { states: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Malformed input file or matrix text.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason: reason.into(),
        }
    }

    /// True for malformed input (as opposed to a violated mathematical
    /// precondition). The CLI maps the former to exit code 1 and the latter to 2.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::InvalidChain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
