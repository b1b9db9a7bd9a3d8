use thiserror::Error;

/// Errors raised by polynomial construction, evaluation, kernels and the
/// expansion engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("evaluation overflowed to a non-finite value")]
    EvalOverflow,

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("scaling relation is singular at z = 0")]
    SingularScaling,

    #[error("outside convergence domain: {quantity} = {value} must be < {bound}")]
    OutsideConvergenceDomain {
        quantity: String,
        value: f64,
        bound: f64,
    },

    #[error("tensor is not Hermite-expandable: recurrence fails at (m, n, p) = ({m}, {n}, {p})")]
    NotHermiteExpandable { m: u32, n: u32, p: u32 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
