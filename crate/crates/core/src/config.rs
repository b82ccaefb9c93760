//! Plain-text problem definitions and the built-in registry.
//!
//! A config is a flat `key = value` file; blank lines and lines starting
//! with `#` are ignored. Required keys are `g`, `K`, `phi`, `tau`, `x0` and
//! `X`; `name` and `exact` are optional. Each function slot only accepts
//! certain variables:
//!
//! | key     | variables      |
//! |---------|----------------|
//! | `g`     | `x`, `u`       |
//! | `K`     | `x`, `t`, `v`  |
//! | `phi`   | `x`            |
//! | `exact` | `x`            |

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::error::EvalError;
use crate::expr::{Bindings, ExprError, Expression, Var};
use crate::problem::DelayProblem;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    MalformedLine { line: usize },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },

    #[error("missing required key `{0}`")]
    MissingKey(&'static str),

    #[error("key `{key}`: {source}")]
    Expression { key: &'static str, source: ExprError },

    #[error("key `{key}` may not reference variable `{var}` (allowed: {allowed})")]
    VariableNotAllowed { key: &'static str, var: Var, allowed: String },

    #[error("key `{key}`: `{value}` is not a number")]
    BadNumber { key: &'static str, value: String },

    #[error("unknown problem `{0}` (not a registry name or readable file)")]
    UnknownProblem(String),

    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error(transparent)]
    Problem(#[from] crate::error::Error),
}

const KEYS: [&str; 8] = ["name", "g", "K", "phi", "exact", "tau", "x0", "X"];

/// A validated problem definition in expression form.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub name: String,
    pub g: Expression,
    pub kernel: Expression,
    pub phi: Expression,
    pub exact: Option<Expression>,
    pub tau: f64,
    pub x0: f64,
    pub x_end: f64,
}

fn slot(key: &'static str, text: &str, allowed: &[Var]) -> Result<Expression, ConfigError> {
    let expr = Expression::parse(text).map_err(|source| ConfigError::Expression { key, source })?;
    if let Some(var) = expr.variables().into_iter().find(|v| !allowed.contains(v)) {
        let allowed = allowed.iter().map(|v| v.name()).collect::<Vec<_>>().join(", ");
        return Err(ConfigError::VariableNotAllowed { key, var, allowed });
    }
    Ok(expr)
}

fn number(key: &'static str, text: &str) -> Result<f64, ConfigError> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::BadNumber { key, value: text.to_string() })
}

const G_VARS: &[Var] = &[Var::X, Var::U];
const K_VARS: &[Var] = &[Var::X, Var::T, Var::V];
const X_VARS: &[Var] = &[Var::X];

impl ProblemConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries: BTreeMap<&'static str, String> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) =
                trimmed.split_once('=').ok_or(ConfigError::MalformedLine { line })?;
            let key = key.trim();
            let known = KEYS
                .into_iter()
                .find(|k| *k == key)
                .ok_or_else(|| ConfigError::UnknownKey { line, key: key.to_string() })?;
            if entries.insert(known, value.trim().to_string()).is_some() {
                return Err(ConfigError::DuplicateKey { line, key: key.to_string() });
            }
        }
        let required = |key: &'static str| entries.get(key).ok_or(ConfigError::MissingKey(key));

        let config = ProblemConfig {
            name: entries.get("name").cloned().unwrap_or_else(|| "unnamed".to_string()),
            g: slot("g", required("g")?, G_VARS)?,
            kernel: slot("K", required("K")?, K_VARS)?,
            phi: slot("phi", required("phi")?, X_VARS)?,
            exact: entries.get("exact").map(|e| slot("exact", e, X_VARS)).transpose()?,
            tau: number("tau", required("tau")?)?,
            x0: number("x0", required("x0")?)?,
            x_end: number("X", required("X")?)?,
        };
        // Surface interval/delay problems at load time.
        config.to_problem()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// Serializes back to the config format. Numbers use Rust's shortest
    /// round-trip representation.
    pub fn to_config_string(&self) -> String {
        let mut out = format!("name = {}\n", self.name);
        out += &format!("g = {}\n", self.g);
        out += &format!("K = {}\n", self.kernel);
        out += &format!("phi = {}\n", self.phi);
        if let Some(exact) = &self.exact {
            out += &format!("exact = {exact}\n");
        }
        out += &format!("tau = {:?}\nx0 = {:?}\nX = {:?}\n", self.tau, self.x0, self.x_end);
        out
    }

    pub fn to_problem(&self) -> Result<DelayProblem, crate::error::Error> {
        let eval_err = |key: &'static str| move |e: ExprError| EvalError(format!("{key}: {e}"));
        let g = self.g.clone();
        let kernel = self.kernel.clone();
        let phi = self.phi.clone();
        let problem = DelayProblem::from_fallible(
            Arc::new(move |x, u| g.evaluate(&Bindings::new().x(x).u(u)).map_err(eval_err("g"))),
            Arc::new(move |x, t, v| {
                kernel.evaluate(&Bindings::new().x(x).t(t).v(v)).map_err(eval_err("K"))
            }),
            Arc::new(move |x| phi.evaluate(&Bindings::new().x(x)).map_err(eval_err("phi"))),
            self.tau,
            self.x0,
            self.x_end,
        )?;
        Ok(match self.exact.clone() {
            Some(exact) => problem.with_exact_fallible(Arc::new(move |x| {
                exact.evaluate(&Bindings::new().x(x)).map_err(eval_err("exact"))
            })),
            None => problem,
        })
    }
}

/// Linear test problem with exact solution `e^x`.
pub const EXAMPLE1: &str = "\
name = example1
g = exp(-1)*(1-exp(x)) + u
K = v
phi = exp(x)
exact = exp(x)
tau = 1
x0 = 0
X = 1
";

/// Nonlinear test problem with exact solution `e^(x+1)`; `u(0) = phi(0) = e`.
pub const EXAMPLE2: &str = "\
name = example2
g = -exp(x)*sinh(x) + u
K = v^2
phi = exp(x+1)
exact = exp(x+1)
tau = 1
x0 = 0
X = 1
";

pub const REGISTRY: [(&str, &str); 2] = [("example1", EXAMPLE1), ("example2", EXAMPLE2)];

pub fn registry_names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|(name, _)| *name)
}

/// Looks up a built-in problem by name.
pub fn builtin(name: &str) -> Option<ProblemConfig> {
    REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| ProblemConfig::parse(text).expect("built-in problems are valid"))
}

/// Resolves a registry name, falling back to a config file path.
pub fn resolve(reference: &str) -> Result<ProblemConfig, ConfigError> {
    if let Some(config) = builtin(reference) {
        return Ok(config);
    }
    let path = Path::new(reference);
    if path.is_file() {
        ProblemConfig::load(path)
    } else {
        Err(ConfigError::UnknownProblem(reference.to_string()))
    }
}
