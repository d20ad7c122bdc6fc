use thiserror::Error;

/// Errors raised by the numerical and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The series evaluator was asked for an argument beyond its guard, or
    /// the result does not fit in an `f64`.
    #[error("range error: {0}")]
    Range(String),

    /// Alternating cancellation destroyed more accuracy than allowed.
    #[error("loss of significance evaluating {what}: estimated relative error {estimate:.3e}")]
    Cancellation { what: &'static str, estimate: f64 },

    /// An iterative method did not reach its tolerance.
    #[error("no convergence in {what}: {detail}")]
    NonConvergence { what: &'static str, detail: String },

    /// A function handed to the conjugation routine was not finite inside
    /// the interval it was declared finite on.
    #[error("contract violation: function is not finite at theta = {theta}")]
    ContractViolation { theta: f64 },

    /// Condition (C1) fails: no interior positive root of the cumulant.
    #[error("adjustment coefficient does not exist: {0}")]
    NoLundbergRoot(String),

    /// Classical model with premium too small to cover expected claims.
    #[error("net profit condition violated: c = {c} but lambda*E[U]/h = {required}")]
    NetProfitViolated { c: f64, required: f64 },

    /// A first-passage replication exceeded its step cap.
    #[error("replication {replication} exceeded the step cap of {cap} steps (last partial sum {partial_sum})")]
    StepCapExceeded {
        replication: u64,
        cap: u64,
        partial_sum: f64,
    },

    /// Every Monte Carlo cell had zero hits.
    #[error("insufficient replications: no hits in any cell with {n_rep} replications")]
    InsufficientReplications { n_rep: u64 },

    /// Malformed input that is not a mathematical domain problem.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Truncation horizon reached before the mass was exhausted.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
