use thiserror::Error;

/// Errors raised across the numerical laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bump integral does not straddle 1 on ({lo}, {hi}): F(lo) = {f_lo:e}, F(hi) = {f_hi:e}")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("coordinate {s} outside [0, {length}]")]
    OutOfDomain { s: f64, length: f64 },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("closed-form heteroclinic only exists for the quartic well")]
    UnsupportedWell,

    #[error("reflection needs an odd node count, got {0}")]
    AsymmetricGrid(usize),

    #[error("profile vanishes identically (|u| <= {tol:e} at every node)")]
    AllZero { tol: f64 },

    #[error("half-domain minimizer is identically zero at epsilon = {epsilon}")]
    TrivialMinimizer { epsilon: f64 },

    #[error("Newton did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("tridiagonal solve broke down at row {row}")]
    SingularJacobian { row: usize },

    #[error("continuation failed at epsilon = {epsilon}: {source}")]
    ContinuationFailed {
        epsilon: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid options: {0}")]
    InvalidOptions(String),

    #[error("time step {dt:e} exceeds the reaction limit epsilon^2/2 = {limit:e}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("lowest eigenvalue {lambda1:e} is nonnegative; the solution is stable")]
    StableInput { lambda1: f64 },

    #[error("flow lost pointwise monotonicity at step {step} (min increment {min_increment:e})")]
    MonotonicityViolated { step: usize, min_increment: f64 },

    #[error("interface lost at t = {time}: the profile became single-signed")]
    InterfaceLost { time: f64 },

    #[error("comparison precondition violated at node {node}: {reason}")]
    PreconditionViolated { node: usize, reason: String },

    #[error("mode {k}, eigenvalue #{which} was not computed")]
    NotComputed { k: usize, which: usize },

    #[error("highest computed mode k = {k_max} still has eigenvalue {lambda:e} <= null tolerance")]
    ModeTruncation { k_max: usize, lambda: f64 },

    #[error("slice s = {s} is not minimal (w'(s) = {w_prime:e})")]
    NotMinimal { s: f64, w_prime: f64 },

    #[error("need at least 3 energies, got {0}")]
    InsufficientData(usize),

    #[error("adjacent critical points closer than 2 * resolution near t = {t}")]
    ResolutionTooCoarse { t: f64 },

    #[error("dimensions: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;
