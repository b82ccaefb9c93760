//! Daftardar-Gejji–Jafari decomposition for scalar equations
//! `u = g0 + L(u) + N(u)`.
//!
//! The solution is sought as a series `u = u_0 + u_1 + …` with
//!
//! ```text
//! u_0     = g0
//! u_1     = L(u_0) + N(u_0)
//! u_{m+1} = L(u_m) + N(u_0 + … + u_m) - N(u_0 + … + u_{m-1}),   m >= 1
//! ```
//!
//! and truncated after `k` terms.

use crate::error::EvalError;

type Operator<'a> = Box<dyn Fn(f64) -> Result<f64, EvalError> + 'a>;

/// `u = g0 + L(u) + N(u)`. `L` is expected to be linear; this is not checked.
pub struct FixedPointProblem<'a> {
    g0: f64,
    linear: Operator<'a>,
    nonlinear: Operator<'a>,
}

impl<'a> FixedPointProblem<'a> {
    pub fn new<L, N>(g0: f64, linear: L, nonlinear: N) -> Self
    where
        L: Fn(f64) -> f64 + 'a,
        N: Fn(f64) -> f64 + 'a,
    {
        Self {
            g0,
            linear: Box::new(move |u| Ok(linear(u))),
            nonlinear: Box::new(move |u| Ok(nonlinear(u))),
        }
    }

    pub fn try_new<L, N>(g0: f64, linear: L, nonlinear: N) -> Self
    where
        L: Fn(f64) -> Result<f64, EvalError> + 'a,
        N: Fn(f64) -> Result<f64, EvalError> + 'a,
    {
        Self { g0, linear: Box::new(linear), nonlinear: Box::new(nonlinear) }
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }
}

/// Series terms and their running partial sums.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeriesState {
    terms: Vec<f64>,
    partial_sums: Vec<f64>,
}

impl SeriesState {
    fn push(&mut self, term: f64) {
        let sum = self.partial_sums.last().map_or(term, |s| s + term);
        self.terms.push(term);
        self.partial_sums.push(sum);
    }

    pub fn terms(&self) -> &[f64] {
        &self.terms
    }

    /// `partial_sums()[m] = terms[0] + … + terms[m]`.
    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of all terms.
    pub fn sum(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }
}

/// First `k` series terms (`k = 0` yields an empty state).
pub fn dgj_terms(p: &FixedPointProblem<'_>, k: usize) -> Result<SeriesState, EvalError> {
    let mut state = SeriesState::default();
    if k == 0 {
        return Ok(state);
    }
    state.push(p.g0);
    // N evaluated at the previous partial sum; G_0 = N(u_0) by convention.
    let mut n_prev = 0.0;
    for m in 0..k - 1 {
        let n_curr = (p.nonlinear)(state.partial_sums[m])?;
        let term = (p.linear)(state.terms[m])? + n_curr - n_prev;
        state.push(term);
        n_prev = n_curr;
    }
    Ok(state)
}

/// `k`-term approximate solution `u_0 + … + u_{k-1}`.
pub fn dgj_solve(p: &FixedPointProblem<'_>, k: usize) -> Result<f64, EvalError> {
    assert!(k >= 1, "a DGJ approximation needs at least one term");
    Ok(dgj_terms(p, k)?.sum())
}
