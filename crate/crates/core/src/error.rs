use thiserror::Error;

use crate::comms::PrecoderMatrix;

/// Errors produced by configuration, model evaluation and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("config parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(
        "infeasible bit count: b = {bits} leaves precoder budget {budget:.6} W (must be positive)"
    )]
    InfeasibleBits { bits: u32, budget: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("common-rate constraint violated: {0}")]
    InfeasibleRates(String),

    #[error("desired beampattern is identically zero")]
    ZeroDesiredPattern,

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("precoder step stopped with KKT residual {residual:.3e}")]
    PrecoderStep {
        residual: f64,
        last: Box<PrecoderMatrix>,
    },

    #[error("ADMM iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{failed} of {total} sweep points failed; first: {first}")]
    Sweep {
        failed: usize,
        total: usize,
        first: String,
    },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
