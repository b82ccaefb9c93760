//! Error tables against exact solutions and observed convergence order.

use std::time::{Duration, Instant};

use crate::error::{Error, EvalError, Result};
use crate::problem::{DelayProblem, QuadratureMode, Trajectory};
use crate::stepper::solve;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub x: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    /// Sorted by `x`.
    pub rows: Vec<ErrorRow>,
    pub h: f64,
    pub mode: QuadratureMode,
    /// Wall-clock time of the solve, when the table was produced by one.
    pub elapsed: Option<Duration>,
}

impl ErrorTable {
    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_error).fold(0.0, f64::max)
    }
}

/// `|exact(x) - u(x)|` at each sample point. Every sample must be a grid
/// point already present in the trajectory.
pub fn error_table<F>(traj: &Trajectory, exact: F, sample_xs: &[f64]) -> Result<ErrorTable>
where
    F: Fn(f64) -> Result<f64, EvalError>,
{
    let mut xs = sample_xs.to_vec();
    xs.sort_by(f64::total_cmp);
    let rows = xs
        .into_iter()
        .map(|x| {
            let u = traj
                .grid()
                .index_of(x)
                .and_then(|j| traj.value(j))
                .ok_or(Error::OffGridSample { x })?;
            Ok(ErrorRow { x, abs_error: (exact(x)? - u).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorTable { rows, h: traj.grid().h(), mode: traj.mode(), elapsed: None })
}

fn exact_of(problem: &DelayProblem) -> Result<&crate::problem::ScalarFn> {
    problem.exact().ok_or_else(|| Error::InvalidProblem("problem has no exact solution".into()))
}

/// Solves with step `h` (timing the solve only) and tabulates errors.
pub fn tabulate(
    problem: &DelayProblem,
    h: f64,
    mode: QuadratureMode,
    sample_xs: &[f64],
) -> Result<ErrorTable> {
    let exact = exact_of(problem)?;
    let grid = problem.grid(h)?;
    let start = Instant::now();
    let traj = solve(problem, &grid, mode)?;
    let elapsed = start.elapsed();
    let mut table = error_table(&traj, |x| exact(x), sample_xs)?;
    table.elapsed = Some(elapsed);
    Ok(table)
}

fn check_error(e: f64) -> Result<f64> {
    if e.is_finite() && e > 0.0 {
        Ok(e)
    } else {
        Err(Error::DegenerateError(e))
    }
}

/// `log2(e_h / e_{h/2})` for errors measured at the same point with step
/// `h` and `h/2`.
pub fn observed_order(e_h: f64, e_h2: f64) -> Result<f64> {
    Ok((check_error(e_h)? / check_error(e_h2)?).log2())
}

/// Which error enters an order study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderTarget {
    /// Largest absolute error over all forward grid points.
    MaxOverGrid,
    /// Error at a single grid point common to every step size.
    At(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    /// `(h, error)` in the order the step sizes were given.
    pub pairs: Vec<(f64, f64)>,
    /// Least-squares slope of `ln(error)` against `ln(h)`.
    pub slope: f64,
}

impl OrderEstimate {
    pub fn from_pairs(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "an order estimate needs at least 2 step sizes, got {}",
                pairs.len()
            )));
        }
        for &(_, e) in &pairs {
            check_error(e)?;
        }
        let pts: Vec<(f64, f64)> = pairs.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
        let n = pts.len() as f64;
        let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
        if sxx <= 0.0 {
            return Err(Error::InsufficientData("step sizes must not all be equal".into()));
        }
        Ok(Self { pairs, slope: sxy / sxx })
    }

    /// Order between consecutive step sizes, `ln(e_a/e_b) / ln(h_a/h_b)`.
    /// Equals [`observed_order`] when each step halves the previous one.
    pub fn pairwise(&self) -> Vec<f64> {
        self.pairs.windows(2).map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln()).collect()
    }
}

/// Solves at each step size and fits the convergence slope.
pub fn order_study(
    problem: &DelayProblem,
    mode: QuadratureMode,
    h_list: &[f64],
    target: OrderTarget,
) -> Result<OrderEstimate> {
    if h_list.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "an order study needs at least 2 step sizes, got {}",
            h_list.len()
        )));
    }
    let exact = exact_of(problem)?;
    let mut pairs = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let traj = solve(problem, &problem.grid(h)?, mode)?;
        let error = match target {
            OrderTarget::At(x) => error_table(&traj, |x| exact(x), &[x])?.rows[0].abs_error,
            OrderTarget::MaxOverGrid => {
                let mut worst: f64 = 0.0;
                for (x, u) in traj.points() {
                    worst = worst.max((exact(x)? - u).abs());
                }
                worst
            }
        };
        pairs.push((h, error));
    }
    OrderEstimate::from_pairs(pairs)
}
