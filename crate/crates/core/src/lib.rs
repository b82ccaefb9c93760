//! Numerical solver for scalar Volterra delay integro-differential equations
//!
//! ```text
//! u'(x) = g(x, u(x)) + ∫_{x0}^{x} K(x, t, u(t - tau)) dt,   u(x) = phi(x) on [x0 - tau, x0]
//! ```
//!
//! The memory integral and the step integral are both discretized with the
//! composite trapezium rule on a uniform grid commensurate with the delay.
//! The resulting implicit step equation is closed explicitly by a three-term
//! Daftardar-Gejji–Jafari (DGJ) decomposition series, which gives the
//! predictor/corrector form implemented in [`stepper`].
//!
//! [`oracle`] solves the same implicit step to tolerance by Picard iteration
//! and serves as ground truth for the truncation of the series, while
//! [`analysis`] builds error tables and observed convergence orders.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod dgj;
pub mod error;
pub mod expr;
pub mod oracle;
pub mod problem;
pub mod stepper;

pub use error::{Error, EvalError, Result};
pub use problem::{
    build_grid, init_trajectory, DelayProblem, GridSpec, QuadratureMode, Trajectory,
};
pub use stepper::{nnm_step, solve};
