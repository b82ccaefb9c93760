//! Continuous problem, uniform grid and the history-aware solution container.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, EvalError, Result};

/// Relative tolerance used for every commensurability check.
pub const COMMENSURATE_TOL: f64 = 1e-9;

pub type RhsFn = Arc<dyn Fn(f64, f64) -> Result<f64, EvalError> + Send + Sync>;
pub type KernelFn = Arc<dyn Fn(f64, f64, f64) -> Result<f64, EvalError> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> Result<f64, EvalError> + Send + Sync>;

/// `u'(x) = g(x, u) + ∫_{x0}^{x} K(x, t, u(t - tau)) dt` on `[x0, x_end]`,
/// with `u = phi` on `[x0 - tau, x0]`.
///
/// The initial value is always `phi(x0)`; there is no separate `u0` field.
#[derive(Clone)]
pub struct DelayProblem {
    g: RhsFn,
    kernel: KernelFn,
    history: ScalarFn,
    exact: Option<ScalarFn>,
    tau: f64,
    x0: f64,
    x_end: f64,
}

impl DelayProblem {
    pub fn new<G, K, P>(g: G, kernel: K, history: P, tau: f64, x0: f64, x_end: f64) -> Result<Self>
    where
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        K: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        P: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_fallible(
            Arc::new(move |x, u| Ok(g(x, u))),
            Arc::new(move |x, t, v| Ok(kernel(x, t, v))),
            Arc::new(move |x| Ok(history(x))),
            tau,
            x0,
            x_end,
        )
    }

    /// Builds a problem from functions that may fail to evaluate, such as
    /// parsed expressions.
    pub fn from_fallible(
        g: RhsFn,
        kernel: KernelFn,
        history: ScalarFn,
        tau: f64,
        x0: f64,
        x_end: f64,
    ) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidProblem(format!("delay must be positive, got {tau}")));
        }
        if !(x0.is_finite() && x_end.is_finite() && x_end > x0) {
            return Err(Error::InvalidProblem(format!(
                "interval [{x0}, {x_end}] is empty or not finite"
            )));
        }
        Ok(Self { g, kernel, history, exact: None, tau, x0, x_end })
    }

    pub fn with_exact<F>(self, exact: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.with_exact_fallible(Arc::new(move |x| Ok(exact(x))))
    }

    pub fn with_exact_fallible(mut self, exact: ScalarFn) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn g(&self, x: f64, u: f64) -> Result<f64, EvalError> {
        (self.g)(x, u)
    }

    pub fn kernel(&self, x: f64, t: f64, v: f64) -> Result<f64, EvalError> {
        (self.kernel)(x, t, v)
    }

    pub fn history(&self, x: f64) -> Result<f64, EvalError> {
        (self.history)(x)
    }

    pub fn exact(&self) -> Option<&ScalarFn> {
        self.exact.as_ref()
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn x_end(&self) -> f64 {
        self.x_end
    }

    /// `u0 = phi(x0)`.
    pub fn initial_value(&self) -> Result<f64, EvalError> {
        self.history(self.x0)
    }

    /// Uniform grid with step `h` over this problem's interval and delay.
    pub fn grid(&self, h: f64) -> Result<GridSpec> {
        build_grid(self.x0, self.x_end, self.tau, h)
    }

    pub(crate) fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        grid.check_against(self.x0, self.x_end, self.tau)
    }
}

impl fmt::Debug for DelayProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DelayProblem")
            .field("tau", &self.tau)
            .field("x0", &self.x0)
            .field("x_end", &self.x_end)
            .field("has_exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

/// Uniform mesh `x_j = x0 + j*h`, `j = -M..=N`, with `tau = M*h` and
/// `x_end - x0 = N*h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    h: f64,
    n: usize,
    m: usize,
    x0: f64,
}

impl GridSpec {
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of forward steps.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of steps spanning one delay.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// `x_j`, computed directly rather than by accumulation.
    pub fn point(&self, j: i64) -> f64 {
        self.x0 + j as f64 * self.h
    }

    /// Index of the grid point at `x`, if `x` lies on the grid within the
    /// commensurability tolerance.
    pub fn index_of(&self, x: f64) -> Option<i64> {
        let j = ((x - self.x0) / self.h).round();
        if !j.is_finite() {
            return None;
        }
        let j = j as i64;
        let tol = COMMENSURATE_TOL * x.abs().max(1.0);
        ((self.point(j) - x).abs() <= tol).then_some(j)
    }

    fn check_against(&self, x0: f64, x_end: f64, tau: f64) -> Result<()> {
        if self.x0 != x0 {
            return Err(Error::GridMismatch(format!(
                "grid origin {} differs from problem origin {x0}",
                self.x0
            )));
        }
        if (self.point(self.n as i64) - x_end).abs() > COMMENSURATE_TOL * x_end.abs().max(1.0) {
            return Err(Error::GridMismatch(format!(
                "grid ends at {} but the problem ends at {x_end}",
                self.point(self.n as i64)
            )));
        }
        if (self.m as f64 * self.h - tau).abs() > COMMENSURATE_TOL * tau.max(1.0) {
            return Err(Error::GridMismatch(format!(
                "grid delay {} differs from problem delay {tau}",
                self.m as f64 * self.h
            )));
        }
        Ok(())
    }
}

fn near_integer(ratio: f64) -> Option<f64> {
    let r = ratio.round();
    (ratio.is_finite() && (ratio - r).abs() <= COMMENSURATE_TOL).then_some(r)
}

/// Builds the uniform grid for step `h`. Both the interval and the delay must
/// be integer multiples of `h`; nothing is rounded silently.
pub fn build_grid(x0: f64, x_end: f64, tau: f64, h: f64) -> Result<GridSpec> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidGrid(format!("step must be positive, got {h}")));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidGrid(format!("delay must be positive, got {tau}")));
    }
    if !(x0.is_finite() && x_end.is_finite() && x_end > x0) {
        return Err(Error::InvalidGrid(format!("interval [{x0}, {x_end}] is empty")));
    }
    let length = x_end - x0;
    if tau / h < 1.0 - COMMENSURATE_TOL {
        return Err(Error::ZeroDelaySteps { tau, h });
    }
    let m = near_integer(tau / h).ok_or(Error::NonCommensurateDelay { tau, h })?;
    let n = near_integer(length / h).ok_or(Error::NonCommensurateInterval { length, h })?;
    if n < 1.0 {
        return Err(Error::NonCommensurateInterval { length, h });
    }
    let grid = GridSpec { h, n: n as usize, m: m as usize, x0 };
    if (grid.point(grid.n as i64) - x_end).abs() > COMMENSURATE_TOL * x_end.abs().max(1.0) {
        return Err(Error::NonCommensurateInterval { length, h });
    }
    if (m * h - tau).abs() > COMMENSURATE_TOL * tau.max(1.0) {
        return Err(Error::NonCommensurateDelay { tau, h });
    }
    Ok(grid)
}

/// How the first step treats the memory integral at `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum QuadratureMode {
    /// The printed trapezium formula at every step, including `j = 0`.
    #[default]
    Literal,
    /// As `Literal`, except the inner integral at `x0` (empty range) is
    /// taken as exactly zero on the first step.
    FirstStepCorrected,
}

impl QuadratureMode {
    pub fn name(self) -> &'static str {
        match self {
            QuadratureMode::Literal => "literal",
            QuadratureMode::FirstStepCorrected => "corrected",
        }
    }
}

impl fmt::Display for QuadratureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Grid values `u_{-M} ..= u_last`. History values are written once at
/// construction; forward values are appended in order and never rewritten.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: GridSpec,
    mode: QuadratureMode,
    values: Vec<f64>,
}

impl Trajectory {
    /// Wraps precomputed values for `j = -M, -M+1, …`. At least the `M + 1`
    /// history values must be present.
    pub fn from_values(grid: GridSpec, mode: QuadratureMode, values: Vec<f64>) -> Result<Self> {
        let min = grid.m + 1;
        let max = grid.m + grid.n + 1;
        if values.len() < min || values.len() > max {
            return Err(Error::InvalidGrid(format!(
                "expected between {min} and {max} values, got {}",
                values.len()
            )));
        }
        Ok(Self { grid, mode, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn mode(&self) -> QuadratureMode {
        self.mode
    }

    /// Highest index present.
    pub fn last_index(&self) -> i64 {
        self.values.len() as i64 - self.grid.m as i64 - 1
    }

    pub fn is_complete(&self) -> bool {
        self.last_index() == self.grid.n as i64
    }

    pub fn value(&self, j: i64) -> Option<f64> {
        let idx = j + self.grid.m as i64;
        if idx < 0 {
            return None;
        }
        self.values.get(idx as usize).copied()
    }

    pub fn try_value(&self, j: i64) -> Result<f64> {
        if j < -(self.grid.m as i64) {
            return Err(Error::IndexOutOfRange { index: j });
        }
        self.value(j).ok_or(Error::IndexNotYetComputed { index: j, last: self.last_index() })
    }

    /// `u(x_j - tau) = u_{j-M}`.
    pub fn delayed_value(&self, j: i64) -> Result<f64> {
        self.try_value(j - self.grid.m as i64)
    }

    /// All stored values, starting at `j = -M`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values for `j = 0..=last`.
    pub fn forward(&self) -> &[f64] {
        &self.values[self.grid.m..]
    }

    /// `(x_j, u_j)` for `j = 0..=last`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.forward().iter().enumerate().map(|(j, &u)| (self.grid.point(j as i64), u))
    }

    pub(crate) fn push(&mut self, value: f64) {
        debug_assert!(!self.is_complete(), "trajectory already holds every grid value");
        self.values.push(value);
    }
}

/// Fills `u_j = phi(x_j)` for `j = -M..=0`.
pub fn init_trajectory(
    problem: &DelayProblem,
    grid: &GridSpec,
    mode: QuadratureMode,
) -> Result<Trajectory> {
    problem.check_grid(grid)?;
    let m = grid.m as i64;
    let mut values = Vec::with_capacity(grid.m + grid.n + 1);
    for j in -m..=0 {
        values.push(problem.history(grid.point(j))?);
    }
    Ok(Trajectory { grid: *grid, mode, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn example1() -> DelayProblem {
        DelayProblem::new(
            |x, u| (-1f64).exp() * (1.0 - x.exp()) + u,
            |_, _, v| v,
            f64::exp,
            1.0,
            0.0,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn grid_counts() {
        let g = build_grid(0.0, 1.0, 1.0, 0.1).unwrap();
        assert_eq!((g.n(), g.m()), (10, 10));
        let g = build_grid(0.0, 1.0, 0.3, 0.1).unwrap();
        assert_eq!((g.n(), g.m()), (10, 3));
    }

    #[test]
    fn grid_rejects_bad_inputs() {
        assert!(matches!(build_grid(0.0, 1.0, 0.25, 0.1), Err(Error::NonCommensurateDelay { .. })));
        assert!(matches!(build_grid(0.0, 1.0, 1.0, 0.3), Err(Error::NonCommensurateDelay { .. })));
        assert!(matches!(build_grid(0.0, 1.0, 0.45, 0.3), Err(Error::NonCommensurateDelay { .. })));
        assert!(matches!(
            build_grid(0.0, 1.0, 0.6, 0.3),
            Err(Error::NonCommensurateInterval { .. })
        ));
        assert!(matches!(build_grid(0.0, 1.0, 0.04, 0.1), Err(Error::ZeroDelaySteps { .. })));
        assert!(matches!(build_grid(0.0, 1.0, 0.01, 0.1), Err(Error::ZeroDelaySteps { .. })));
        assert!(matches!(build_grid(0.0, 1.0, 1.0, 0.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(build_grid(0.0, 1.0, 0.0, 0.1), Err(Error::InvalidGrid(_))));
        assert!(matches!(build_grid(1.0, 1.0, 1.0, 0.1), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn grid_points_use_direct_formula() {
        let g = build_grid(0.5, 1.5, 0.7, 0.1).unwrap();
        for j in -(g.m() as i64)..=g.n() as i64 {
            assert_eq!(g.point(j), 0.5 + j as f64 * 0.1);
        }
        assert_eq!(g.index_of(1.0), Some(5));
        assert_eq!(g.index_of(1.05), None);
    }

    #[test]
    fn history_prefill() {
        let p = example1();
        let grid = p.grid(0.1).unwrap();
        let traj = init_trajectory(&p, &grid, QuadratureMode::Literal).unwrap();
        assert_eq!(traj.value(-10), Some(grid.point(-10).exp()));
        assert!((traj.value(-10).unwrap() - (-1f64).exp()).abs() < 1e-15);
        assert_eq!(traj.value(0), Some(1.0));
        assert_eq!(traj.value(1), None);
        assert_eq!(traj.last_index(), 0);
        for j in -10..=0 {
            assert_eq!(traj.value(j).unwrap(), grid.point(j).exp());
        }
    }

    #[test]
    fn zero_history() {
        let p = DelayProblem::new(|_, _| 0.0, |_, _, _| 0.0, |_| 0.0, 0.5, 0.0, 1.0).unwrap();
        let traj = init_trajectory(&p, &p.grid(0.1).unwrap(), QuadratureMode::Literal).unwrap();
        assert!(traj.values().iter().all(|&v| v == 0.0));
        assert_eq!(traj.values().len(), 6);
    }

    #[test]
    fn example2_initial_value_is_e() {
        let p = DelayProblem::new(|_, u| u, |_, _, v| v * v, |x| (x + 1.0).exp(), 1.0, 0.0, 1.0)
            .unwrap();
        let traj = init_trajectory(&p, &p.grid(0.1).unwrap(), QuadratureMode::Literal).unwrap();
        assert!((traj.value(0).unwrap() - E).abs() < 1e-15);
        assert_eq!(p.initial_value().unwrap(), traj.value(0).unwrap());
    }

    #[test]
    fn delayed_lookup() {
        let p = example1();
        let grid = p.grid(0.1).unwrap();
        let mut traj = init_trajectory(&p, &grid, QuadratureMode::Literal).unwrap();
        assert_eq!(traj.delayed_value(0).unwrap(), grid.point(-10).exp());
        assert_eq!(traj.delayed_value(10).unwrap(), 1.0);
        assert!(matches!(
            traj.delayed_value(12),
            Err(Error::IndexNotYetComputed { index: 2, last: 0 })
        ));
        traj.push(1.5);
        traj.push(2.5);
        assert_eq!(traj.delayed_value(12).unwrap(), 2.5);
        assert!(matches!(traj.delayed_value(-1), Err(Error::IndexOutOfRange { index: -11 })));
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let p = example1();
        let other = build_grid(0.0, 2.0, 1.0, 0.1).unwrap();
        assert!(matches!(
            init_trajectory(&p, &other, QuadratureMode::Literal),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn problem_validation() {
        assert!(DelayProblem::new(|_, u| u, |_, _, v| v, |x| x, 0.0, 0.0, 1.0).is_err());
        assert!(DelayProblem::new(|_, u| u, |_, _, v| v, |x| x, 1.0, 1.0, 0.0).is_err());
    }
}
