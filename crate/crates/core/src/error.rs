use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure raised by a user-supplied problem function.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{0}")]
pub struct EvalError(pub String);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid grid parameters: {0}")]
    InvalidGrid(String),

    #[error("interval length {length} is not an integer multiple of h = {h}")]
    NonCommensurateInterval { length: f64, h: f64 },

    #[error("delay tau = {tau} is not an integer multiple of h = {h}")]
    NonCommensurateDelay { tau: f64, h: f64 },

    #[error("delay tau = {tau} spans zero steps of h = {h}")]
    ZeroDelaySteps { tau: f64, h: f64 },

    #[error("grid does not match the problem: {0}")]
    GridMismatch(String),

    #[error("index {index} has not been computed yet (last index is {last})")]
    IndexNotYetComputed { index: i64, last: i64 },

    #[error("index {index} lies before the start of the history")]
    IndexOutOfRange { index: i64 },

    #[error("function evaluation failed: {0}")]
    Eval(#[from] EvalError),

    #[error("non-finite {quantity} at step {step}")]
    NonFiniteState { step: usize, quantity: &'static str },

    #[error("fixed-point iteration did not converge at step {step} after {iterations} iterations (residual {residual:e})")]
    NoConvergence { step: usize, iterations: usize, residual: f64 },

    #[error("sample x = {x} is not a grid point")]
    OffGridSample { x: f64 },

    #[error("degenerate error value {0:e}; cannot take a logarithm")]
    DegenerateError(f64),

    #[error("{0}")]
    InsufficientData(String),
}
