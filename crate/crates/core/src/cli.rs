//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage and configuration errors, 3 for
//! numerical failures (non-finite state, oracle divergence, degenerate
//! errors in an order study).

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{order_study, tabulate, OrderTarget};
use crate::config::{resolve, ConfigError, ProblemConfig, REGISTRY};
use crate::error::Error;
use crate::oracle::{solve_implicit, OracleConfig};
use crate::problem::{DelayProblem, QuadratureMode};
use crate::stepper::solve;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "vdide",
    version,
    about = "Solve Volterra delay integro-differential equations u'(x) = g(x,u) + ∫ K(x,t,u(t-tau)) dt",
    after_help = "Problems are registry names (see `list-problems`) or `key = value` config files \
                  with keys name, g, K, phi, exact, tau, x0, X. In expressions `^` is \
                  right-associative and binds tighter than unary minus, so -x^2 = -(x^2)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve on a uniform grid and write `x,u` for every grid point.
    Solve(SolveArgs),
    /// Absolute errors against the exact solution for several step sizes.
    Table(TableArgs),
    /// Observed convergence order over a sequence of step sizes.
    Order(OrderArgs),
    /// Compare the explicit step with the implicit step solved to tolerance.
    Compare(CompareArgs),
    /// List the built-in problems.
    ListProblems,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FirstStep {
    Literal,
    Corrected,
}

impl From<FirstStep> for QuadratureMode {
    fn from(value: FirstStep) -> Self {
        match value {
            FirstStep::Literal => QuadratureMode::Literal,
            FirstStep::Corrected => QuadratureMode::FirstStepCorrected,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Registry name or path to a config file.
    #[arg(long)]
    pub problem: String,
    /// Quadrature used for the first step.
    #[arg(long, value_enum, default_value = "literal")]
    pub first_step: FirstStep,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Step size.
    #[arg(long)]
    pub h: f64,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub h: Vec<f64>,
    /// Comma-separated sample points (default: ten equally spaced points
    /// after x0).
    #[arg(long, value_delimiter = ',')]
    pub at: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated step sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub h: Vec<f64>,
    /// Measure the error at this point instead of the maximum over the grid.
    #[arg(long)]
    pub at: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Step size.
    #[arg(long)]
    pub h: f64,
    /// Fixed-point residual tolerance of the implicit solve.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    /// Iteration limit of the implicit solve.
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::NonFiniteState { .. }
            | Error::NoConvergence { .. }
            | Error::Eval(_)
            | Error::DegenerateError(_)
            | Error::IndexNotYetComputed { .. }
            | Error::IndexOutOfRange { .. } => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        };
        CliError { code, message: err.to_string() }
    }
}

impl From<ConfigError> for CliError {
    fn from(err: ConfigError) -> Self {
        match err {
            ConfigError::Problem(inner) => inner.into(),
            other => CliError { code: EXIT_USAGE, message: other.to_string() },
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, message: message.into() }
}

/// 17 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn load(reference: &str) -> Result<(ProblemConfig, DelayProblem), CliError> {
    let config = resolve(reference)?;
    let problem = config.to_problem()?;
    Ok((config, problem))
}

pub fn cmd_solve(args: &SolveArgs) -> Result<String, CliError> {
    let (_, problem) = load(&args.common.problem)?;
    let grid = problem.grid(args.h)?;
    let traj = solve(&problem, &grid, args.common.first_step.into())?;
    let mut out = String::from("x,u\n");
    for (x, u) in traj.points() {
        writeln!(out, "{},{}", fmt_num(x), fmt_num(u)).unwrap();
    }
    Ok(out)
}

fn default_samples(problem: &DelayProblem) -> Vec<f64> {
    let len = problem.x_end() - problem.x0();
    (1..=10).map(|k| problem.x0() + len * k as f64 / 10.0).collect()
}

pub fn cmd_table(args: &TableArgs) -> Result<String, CliError> {
    let (config, problem) = load(&args.common.problem)?;
    if !problem.has_exact() {
        return Err(usage(format!("problem `{}` has no exact solution", config.name)));
    }
    let samples = args.at.clone().unwrap_or_else(|| default_samples(&problem));
    let mode = args.common.first_step.into();
    let tables = args
        .h
        .iter()
        .map(|&h| tabulate(&problem, h, mode, &samples))
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = String::from("x");
    for h in &args.h {
        write!(out, ",abs_error_h={h}").unwrap();
    }
    out.push('\n');
    for (i, row) in tables[0].rows.iter().enumerate() {
        out += &fmt_num(row.x);
        for table in &tables {
            write!(out, ",{}", fmt_num(table.rows[i].abs_error)).unwrap();
        }
        out.push('\n');
    }
    for (h, table) in args.h.iter().zip(&tables) {
        let secs = table.elapsed.unwrap_or_default().as_secs_f64();
        writeln!(out, "# elapsed_h={h}: {secs:.6}").unwrap();
    }
    Ok(out)
}

pub fn cmd_order(args: &OrderArgs) -> Result<String, CliError> {
    if args.h.len() < 2 {
        return Err(usage(format!("order needs at least 2 step sizes, got {}", args.h.len())));
    }
    let (config, problem) = load(&args.common.problem)?;
    let mode: QuadratureMode = args.common.first_step.into();
    let target = args.at.map_or(OrderTarget::MaxOverGrid, OrderTarget::At);
    let estimate = order_study(&problem, mode, &args.h, target)?;

    let mut out = String::new();
    writeln!(out, "problem: {}", config.name).unwrap();
    writeln!(out, "first step: {mode}").unwrap();
    match target {
        OrderTarget::MaxOverGrid => writeln!(out, "error: max over grid").unwrap(),
        OrderTarget::At(x) => writeln!(out, "error: at x = {x}").unwrap(),
    }
    for (h, e) in &estimate.pairs {
        writeln!(out, "h = {h}  error = {}", fmt_num(*e)).unwrap();
    }
    for (w, order) in estimate.pairs.windows(2).zip(estimate.pairwise()) {
        writeln!(out, "order {} -> {} = {order:.6}", w[0].0, w[1].0).unwrap();
    }
    writeln!(out, "slope = {:.6}", estimate.slope).unwrap();
    Ok(out)
}

pub fn cmd_compare(args: &CompareArgs) -> Result<String, CliError> {
    let (_, problem) = load(&args.common.problem)?;
    let cfg = OracleConfig { tol: args.tol, max_iter: args.max_iter };
    cfg.validate()?;
    let grid = problem.grid(args.h)?;
    let mode = args.common.first_step.into();
    let explicit = solve(&problem, &grid, mode)?;
    let implicit = solve_implicit(&problem, &grid, mode, &cfg)?;

    let mut out = String::from("x,u_nnm,u_implicit,diff\n");
    let mut max_diff: f64 = 0.0;
    for ((x, a), (_, b)) in explicit.points().zip(implicit.points()) {
        let diff = a - b;
        max_diff = max_diff.max(diff.abs());
        writeln!(out, "{},{},{},{}", fmt_num(x), fmt_num(a), fmt_num(b), fmt_num(diff)).unwrap();
    }
    writeln!(out, "# max_abs_diff: {}", fmt_num(max_diff)).unwrap();
    Ok(out)
}

pub fn cmd_list_problems() -> String {
    let mut out = String::new();
    for (name, text) in REGISTRY {
        writeln!(out, "[{name}]").unwrap();
        for line in text.lines().filter(|l| !l.starts_with("name")) {
            writeln!(out, "  {line}").unwrap();
        }
    }
    out
}

/// Runs a parsed command and returns the data it produces.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Table(a) => cmd_table(a),
        Command::Order(a) => cmd_order(a),
        Command::Compare(a) => cmd_compare(a),
        Command::ListProblems => Ok(cmd_list_problems()),
    }
}

fn out_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Solve(a) => a.common.out.as_ref(),
        Command::Table(a) => a.common.out.as_ref(),
        Command::Order(a) => a.common.out.as_ref(),
        Command::Compare(a) => a.common.out.as_ref(),
        Command::ListProblems => None,
    }
}

/// Executes the command and writes its output to `--out` or standard output.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let data = execute(cli)?;
    match out_path(cli) {
        Some(path) => std::fs::write(path, data)
            .map_err(|e| usage(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}
