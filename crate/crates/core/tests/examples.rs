use std::f64::consts::E;

use vdide::analysis::{error_table, tabulate};
use vdide::config::{builtin, registry_names, ProblemConfig};
use vdide::oracle::{solve_implicit, OracleConfig};
use vdide::stepper::{solve, solve_with_step};
use vdide::{DelayProblem, QuadratureMode};

const XS: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

fn example1_closures() -> DelayProblem {
    DelayProblem::new(
        |x, u| (-1f64).exp() * (1.0 - x.exp()) + u,
        |_, _, v| v,
        f64::exp,
        1.0,
        0.0,
        1.0,
    )
    .unwrap()
    .with_exact(f64::exp)
}

fn example2_closures() -> DelayProblem {
    DelayProblem::new(
        |x, u| -x.exp() * x.sinh() + u,
        |_, _, v| v * v,
        |x| (x + 1.0).exp(),
        1.0,
        0.0,
        1.0,
    )
    .unwrap()
    .with_exact(|x| (x + 1.0).exp())
}

fn registry(name: &str) -> DelayProblem {
    builtin(name).unwrap().to_problem().unwrap()
}

fn close_rel(got: f64, want: f64, rel: f64) {
    assert!((got - want).abs() <= rel * want.abs(), "{got:e} vs {want:e}");
}

#[test]
fn example1_end_point_errors() {
    let p = registry("example1");
    let t = solve_with_step(&p, 0.01, QuadratureMode::Literal).unwrap();
    close_rel((t.value(100).unwrap() - E).abs(), 4.6129e-5, 1e-4);
    let t = solve_with_step(&p, 0.1, QuadratureMode::Literal).unwrap();
    close_rel((t.value(10).unwrap() - E).abs(), 4.43746e-3, 1e-4);
}

#[test]
fn example2_mid_point_error() {
    let p = registry("example2");
    let t = solve_with_step(&p, 0.02, QuadratureMode::Literal).unwrap();
    close_rel((t.value(25).unwrap() - 1.5f64.exp()).abs(), 3.28155e-4, 1e-4);
}

#[test]
fn error_table_rows() {
    let p = registry("example1");
    let exact = p.exact().unwrap().clone();
    let t = solve_with_step(&p, 0.01, QuadratureMode::Literal).unwrap();
    let table = error_table(&t, |x| exact(x), &XS).unwrap();
    close_rel(table.rows[0].abs_error, 1.98103e-5, 1e-4);

    let table = tabulate(&registry("example2"), 0.1, QuadratureMode::Literal, &XS).unwrap();
    close_rel(table.rows[9].abs_error, 1.68753e-2, 1e-4);
    assert!(table.elapsed.is_some());
}

#[test]
fn errors_grow_along_x() {
    for name in registry_names() {
        for h in [0.01, 0.02, 0.1] {
            let table = tabulate(&registry(name), h, QuadratureMode::Literal, &XS).unwrap();
            for w in table.rows.windows(2) {
                assert!(w[1].abs_error >= w[0].abs_error, "{name} h={h}: {w:?}");
            }
        }
    }
}

#[test]
fn expression_and_closure_problems_agree() {
    for (expr, closures) in
        [(registry("example1"), example1_closures()), (registry("example2"), example2_closures())]
    {
        let a = solve_with_step(&expr, 0.02, QuadratureMode::Literal).unwrap();
        let b = solve_with_step(&closures, 0.02, QuadratureMode::Literal).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-13 * y.abs());
        }
    }
}

#[test]
fn registry_round_trip_gives_identical_trajectories() {
    for name in registry_names() {
        let config = builtin(name).unwrap();
        let reloaded = ProblemConfig::parse(&config.to_config_string()).unwrap();
        let a =
            solve_with_step(&config.to_problem().unwrap(), 0.05, QuadratureMode::Literal).unwrap();
        let b = solve_with_step(&reloaded.to_problem().unwrap(), 0.05, QuadratureMode::Literal)
            .unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn example1_oracle_stays_close() {
    let p = registry("example1");
    let grid = p.grid(0.1).unwrap();
    let explicit = solve(&p, &grid, QuadratureMode::Literal).unwrap();
    let implicit =
        solve_implicit(&p, &grid, QuadratureMode::Literal, &OracleConfig::default()).unwrap();
    let max_diff = explicit
        .forward()
        .iter()
        .zip(implicit.forward())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    // Ten steps of an O(h³) per-step difference with h = 0.1.
    assert!(max_diff > 0.0 && max_diff <= 10.0 * 0.1f64.powi(3), "{max_diff}");
}

#[test]
fn corrected_mode_changes_first_step_only_through_origin_kernel() {
    // K(x0, x0, phi(x0 - tau)) = e^-1 for the linear example.
    let p = registry("example1");
    let lit = solve_with_step(&p, 0.1, QuadratureMode::Literal).unwrap();
    let cor = solve_with_step(&p, 0.1, QuadratureMode::FirstStepCorrected).unwrap();
    let shift = lit.value(1).unwrap() - cor.value(1).unwrap();
    let leading = 0.1f64.powi(2) / 2.0 * (-1f64).exp();
    assert!((shift - leading).abs() <= 0.1 * leading, "{shift} vs {leading}");
}
