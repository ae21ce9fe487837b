use thiserror::Error;

/// Errors raised across table construction, generation, inference and the study.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("evidence state (e1={e1}, e2={e2}) has zero probability; conditionals are undefined")]
    ZeroMarginal { e1: bool, e2: bool },

    #[error("evidence {evidence} has degenerate base rate {base_rate}; link parameters are undefined")]
    DegenerateBaseRate { evidence: usize, base_rate: f64 },

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("invalid probability {value} for {what}")]
    InvalidProbability { what: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no evidence supplied to combination rule")]
    EmptyEvidence,

    #[error("proportional fitting did not converge after {iterations} iterations (deviation {deviation:e})")]
    NoConvergence { iterations: usize, deviation: f64 },

    #[error("update infeasible: {0}")]
    Infeasible(String),

    #[error("evidence is not independent (|P(E1 & E2) - P(E1)P(E2)| = {deviation:e})")]
    NotIndependent { deviation: f64 },

    #[error("constraint system is singular or underdetermined")]
    SingularConstraints,

    #[error("generation of network {index} failed after {attempts} attempts: {source}")]
    GenerationFailed {
        index: usize,
        attempts: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("network {network} failed: {message}")]
    NetworkFailed { network: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
