//! Explicit three-term DGJ step for the trapezium-discretized equation.
//!
//! Integrating from `x_j` to `x_{j+1}` and applying the trapezium rule to
//! both the step integral and the memory integral gives an implicit
//! equation `u_{j+1} = M1 + (h/2) g(x_{j+1}, u_{j+1})`, where `M1` collects
//! every known term. Three terms of the DGJ series close it explicitly:
//!
//! ```text
//! M2      = M1 + (h/2) g(x_{j+1}, M1)
//! u_{j+1} = M1 + (h/2) g(x_{j+1}, M2)
//! ```

use crate::error::{Error, Result};
use crate::problem::{init_trajectory, DelayProblem, GridSpec, QuadratureMode, Trajectory};

/// Trapezium contributions of the memory integral to one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTerms {
    /// `h²/4`-weighted endpoint kernel values.
    pub corner: f64,
    /// `Σ_{i=1}^{j-1} K(x_j, x_i, u_{i-M})`
    pub s1: f64,
    /// `Σ_{i=1}^{j} K(x_{j+1}, x_i, u_{i-M})`
    pub s2: f64,
}

/// Intermediate quantities of a single step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepWorkspace {
    pub corner: f64,
    pub s1: f64,
    pub s2: f64,
    /// Predictor: every known term of the implicit step.
    pub m1: f64,
    /// `m1 + (h/2) g(x_{j+1}, m1)`
    pub m2: f64,
}

fn finite(value: f64, step: usize, quantity: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteState { step, quantity })
    }
}

fn check_step(traj: &Trajectory, j: usize) -> Result<()> {
    let n = traj.grid().n();
    if j >= n {
        return Err(Error::InvalidGrid(format!("step {j} is past the last step {}", n - 1)));
    }
    if j as i64 > traj.last_index() {
        return Err(Error::IndexNotYetComputed { index: j as i64, last: traj.last_index() });
    }
    Ok(())
}

/// Memory-integral terms for the step `x_j -> x_{j+1}`, using the
/// trajectory's quadrature mode.
pub fn kernel_terms(problem: &DelayProblem, traj: &Trajectory, j: usize) -> Result<KernelTerms> {
    check_step(traj, j)?;
    let grid = traj.grid();
    let h = grid.h();
    let ji = j as i64;
    let x = |i: i64| grid.point(i);
    let x0 = x(0);
    let (xj, xj1) = (x(ji), x(ji + 1));
    let u_first = traj.delayed_value(0)?;
    let step = j + 1;

    if j == 0 && traj.mode() == QuadratureMode::FirstStepCorrected {
        // The inner integral over [x0, x0] vanishes, so only the x_1 end
        // of the outer trapezium contributes.
        let sum =
            problem.kernel(xj1, x0, u_first)? + problem.kernel(xj1, xj1, traj.delayed_value(1)?)?;
        let corner = finite(h * h / 4.0 * sum, step, "kernel corner term")?;
        return Ok(KernelTerms { corner, s1: 0.0, s2: 0.0 });
    }

    let sum = problem.kernel(xj, x0, u_first)?
        + problem.kernel(xj, xj, traj.delayed_value(ji)?)?
        + problem.kernel(xj1, x0, u_first)?
        + problem.kernel(xj1, xj1, traj.delayed_value(ji + 1)?)?;
    let corner = finite(h * h / 4.0 * sum, step, "kernel corner term")?;

    let mut s1 = 0.0;
    for i in 1..ji {
        s1 += problem.kernel(xj, x(i), traj.delayed_value(i)?)?;
    }
    let mut s2 = 0.0;
    for i in 1..=ji {
        s2 += problem.kernel(xj1, x(i), traj.delayed_value(i)?)?;
    }
    Ok(KernelTerms {
        corner,
        s1: finite(s1, step, "kernel sum")?,
        s2: finite(s2, step, "kernel sum")?,
    })
}

/// Every known term of the implicit step: `u_j + (h/2) g(x_j, u_j) +
/// corner + (h²/2)(s1 + s2)`.
pub fn predictor(
    problem: &DelayProblem,
    traj: &Trajectory,
    j: usize,
) -> Result<(KernelTerms, f64)> {
    let terms = kernel_terms(problem, traj, j)?;
    let grid = traj.grid();
    let h = grid.h();
    let uj = traj.try_value(j as i64)?;
    let gj = finite(problem.g(grid.point(j as i64), uj)?, j + 1, "g(x_j, u_j)")?;
    let m1 = uj + h / 2.0 * gj + terms.corner + h * h / 2.0 * (terms.s1 + terms.s2);
    Ok((terms, finite(m1, j + 1, "predictor M1")?))
}

pub fn step_workspace(
    problem: &DelayProblem,
    traj: &Trajectory,
    j: usize,
) -> Result<StepWorkspace> {
    let (terms, m1) = predictor(problem, traj, j)?;
    let h = traj.grid().h();
    let x_next = traj.grid().point(j as i64 + 1);
    let m2 = m1 + h / 2.0 * problem.g(x_next, m1)?;
    Ok(StepWorkspace {
        corner: terms.corner,
        s1: terms.s1,
        s2: terms.s2,
        m1,
        m2: finite(m2, j + 1, "corrector M2")?,
    })
}

/// `u_{j+1}` from the values up to `u_j`.
pub fn nnm_step(problem: &DelayProblem, traj: &Trajectory, j: usize) -> Result<f64> {
    let ws = step_workspace(problem, traj, j)?;
    let h = traj.grid().h();
    let x_next = traj.grid().point(j as i64 + 1);
    let next = ws.m1 + h / 2.0 * problem.g(x_next, ws.m2)?;
    finite(next, j + 1, "solution value")
}

/// Advances from the history to `x_N`, one explicit step per grid point.
pub fn solve(problem: &DelayProblem, grid: &GridSpec, mode: QuadratureMode) -> Result<Trajectory> {
    let mut traj = init_trajectory(problem, grid, mode)?;
    for j in 0..grid.n() {
        let next = nnm_step(problem, &traj, j)?;
        traj.push(next);
    }
    Ok(traj)
}

/// [`solve`] on the grid with step `h`.
pub fn solve_with_step(problem: &DelayProblem, h: f64, mode: QuadratureMode) -> Result<Trajectory> {
    solve(problem, &problem.grid(h)?, mode)
}
