mod common;

use dini_core::{ExprFunction, ImplicitSolution, ScalarOptions, SplitPoint};
use dini_oracles::corpus;

fn circle_solution() -> ImplicitSolution {
    let f = ExprFunction::parse(&["x^2 + y^2 - 1"], &["x", "y"]).unwrap();
    let opts = ScalarOptions {
        half_width: 0.9,
        ..ScalarOptions::default()
    };
    ImplicitSolution::from_expr(&f, SplitPoint::new(vec![0.0], vec![1.0]), &opts).unwrap()
}

#[test]
fn circle_matches_closed_form() {
    let sol = circle_solution();
    let y = sol.solve_at(&[0.6]).unwrap();
    assert!((y - 0.8).abs() <= 1e-10, "{y}");
    let g = sol.gradient_at(&[0.6]).unwrap()[0];
    assert!((g + 0.75).abs() <= 1e-8, "{g}");
    for i in -8..=8 {
        let x = 0.1 * i as f64;
        let y = sol.solve_at(&[x]).unwrap();
        assert!((y - (1.0 - x * x).sqrt()).abs() <= 1e-10);
    }
}

#[test]
fn circle_box_sign_conditions_hold_on_dense_scan() {
    let sol = circle_solution();
    let bx = sol.solution_box();
    let f = |x: f64, y: f64| x * x + y * y - 1.0;
    for i in 1..100 {
        let x = bx.x_lo[0] + (bx.x_hi[0] - bx.x_lo[0]) * i as f64 / 100.0;
        assert!(f(x, bx.y_lo) < 0.0 && f(x, bx.y_hi) > 0.0, "endpoint signs at x = {x}");
        for j in 0..=100 {
            let y = bx.y_lo + (bx.y_hi - bx.y_lo) * j as f64 / 100.0;
            assert!(2.0 * y > 0.0);
        }
    }
    assert!(bx.y_lo > 0.0 && bx.y_hi < 2.0);
}

#[test]
fn gradient_matches_finite_differences() {
    for sys in [corpus::circle(), corpus::jacobian_suite()[1].clone()] {
        let (_, solution) = common::build(&sys);
        for x in common::interior_points(&solution, 12, 0.05) {
            let exact = solution.jacobian_at(&x).unwrap();
            let fd = common::fd_jacobian(&solution, &x, 1e-6);
            assert!((exact[(0, 0)] - fd[0][0]).abs() <= 1e-5, "{}: at {x:?}", sys.name);
        }
    }
}

#[test]
fn dense_scan_finds_one_zero() {
    let sol = circle_solution();
    for x in [-0.6, 0.0, 0.3, 0.6] {
        let zeros = sol.scan_zeros(&[x], 10_000).unwrap();
        assert_eq!(zeros.len(), 1, "x = {x}: {zeros:?}");
        assert!((zeros[0] - sol.solve_at(&[x]).unwrap()).abs() <= 1e-9);
    }
}

#[test]
fn solution_is_continuous_and_agrees_with_newton() {
    let sol = circle_solution();
    let mut previous: Option<f64> = None;
    for i in -80..=80 {
        let x = 0.01 * i as f64;
        let y = sol.solve_at(&[x]).unwrap();
        if let Some(p) = previous {
            // |dy/dx| ≤ 0.8/0.6 on |x| ≤ 0.8.
            assert!((y - p).abs() <= 0.014);
        }
        previous = Some(y);
        let newton = dini_oracles::newton(|v: &[f64]| vec![x * x + v[0] * v[0] - 1.0], &[1.0], 1e-14, 100)
            .unwrap();
        assert!((newton[0] - y).abs() <= 1e-7);
    }
}

#[test]
fn outside_queries_are_rejected() {
    let sol = circle_solution();
    assert!(matches!(
        sol.solve_at(&[5.0]),
        Err(dini_core::Error::OutsideBox { level: 0, .. })
    ));
}
