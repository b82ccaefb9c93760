//! Reference solver: the implicit trapezium step solved to tolerance.
//!
//! Uses the same predictor `M1` as [`crate::stepper`], then runs Picard
//! iteration `u <- M1 + (h/2) g(x_{j+1}, u)` from `u = M1` until the
//! fixed-point residual drops below `tol`. The difference from the explicit
//! step isolates the truncation of the three-term series.

use crate::error::{Error, Result};
use crate::problem::{init_trajectory, DelayProblem, GridSpec, QuadratureMode, Trajectory};
use crate::stepper::predictor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Absolute bound on `|u - M1 - (h/2) g(x_{j+1}, u)|`.
    pub tol: f64,
    /// Maximum number of Picard updates per step.
    pub max_iter: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { tol: 1e-13, max_iter: 100 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidProblem(format!(
                "oracle tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidProblem("oracle needs at least one iteration".into()));
        }
        Ok(())
    }
}

/// Outcome of one converged implicit step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitStep {
    pub value: f64,
    pub predictor: f64,
    pub residual: f64,
    pub iterations: usize,
}

pub fn implicit_step_report(
    problem: &DelayProblem,
    traj: &Trajectory,
    j: usize,
    cfg: &OracleConfig,
) -> Result<ImplicitStep> {
    cfg.validate()?;
    let (_, m1) = predictor(problem, traj, j)?;
    let half_h = traj.grid().h() / 2.0;
    let x_next = traj.grid().point(j as i64 + 1);
    let step = j + 1;

    let mut u = m1;
    let mut residual = f64::INFINITY;
    for iterations in 0..=cfg.max_iter {
        let update = half_h * problem.g(x_next, u)?;
        if !update.is_finite() {
            return Err(Error::NonFiniteState { step, quantity: "implicit iterate" });
        }
        // Accept on the residual of the step equation itself, evaluated as
        // u - M1 - (h/2) g(x_{j+1}, u).
        residual = (u - m1 - update).abs();
        if residual <= cfg.tol {
            return Ok(ImplicitStep { value: u, predictor: m1, residual, iterations });
        }
        u = m1 + update;
    }
    Err(Error::NoConvergence { step, iterations: cfg.max_iter, residual })
}

/// `u_{j+1}` solving the implicit trapezium step to `cfg.tol`.
pub fn implicit_step(
    problem: &DelayProblem,
    traj: &Trajectory,
    j: usize,
    cfg: &OracleConfig,
) -> Result<f64> {
    implicit_step_report(problem, traj, j, cfg).map(|s| s.value)
}

pub fn solve_implicit(
    problem: &DelayProblem,
    grid: &GridSpec,
    mode: QuadratureMode,
    cfg: &OracleConfig,
) -> Result<Trajectory> {
    let mut traj = init_trajectory(problem, grid, mode)?;
    for j in 0..grid.n() {
        let next = implicit_step(problem, &traj, j, cfg)?;
        traj.push(next);
    }
    Ok(traj)
}
