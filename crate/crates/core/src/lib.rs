//! Constrained convex optimization with a noise-adaptive, accelerated
//! second-order method.
//!
//! The centerpiece is an extragradient-style solver whose extrapolation step
//! minimizes a Hessian-augmented quadratic model under a proximal term, with
//! a parameter-free adaptive step-size that accumulates the mismatch between
//! fresh gradients and a second-order Taylor prediction. The same loop covers
//! deterministic, additive-noise and minibatch oracles without retuning.
//!
//! Supporting modules provide objective functions with exact derivatives
//! ([`problems`]), feasible sets and the quadratic subproblem solvers
//! ([`constraints`]), stochastic oracle wrappers ([`oracles`]), weight and
//! step-size bookkeeping ([`schedule`]), comparison baselines ([`baselines`]),
//! executable convergence checks ([`diagnostics`]) and LIBSVM / run-record
//! persistence ([`data_io`]).

pub mod baselines;
pub mod constraints;
pub mod data_io;
pub mod diagnostics;
pub mod extra_newton;
pub mod numerics;
pub mod oracles;
pub mod problems;
pub mod schedule;

/// Dense point in R^d.
pub type Vector = nalgebra::DVector<f64>;
/// Dense real matrix.
pub type Matrix = nalgebra::DMatrix<f64>;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (relative asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("eigensolver did not converge: {0}")]
    EigenFailure(String),
    #[error("factorization failed: matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("solver did not converge within {iterations} iterations (residual {residual:.3e}, tol {tol:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },
    #[error("no sign change on [{lo}, {hi}]: phi(lo)={f_lo:.3e}, phi(hi)={f_hi:.3e}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("set is unbounded: {0}")]
    UnboundedSet(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("classification label must be -1 or +1, found {0}")]
    InvalidLabel(f64),
    #[error("unsupported oracle mode: {0}")]
    UnsupportedMode(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("record integrity error: {0}")]
    Integrity(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("objective diverged at iteration {t} (value {value:.3e})")]
    Diverged { t: u64, value: f64 },
    #[error("invariant violated at iteration {t}: {msg}")]
    Invariant { t: u64, msg: String },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(v: &Vector, what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}
