use dini_core::grid::Grid;
use dini_core::{build_inverse, ExprFunction, Matrix, ScalarOptions, SystemOptions};

fn complex_square() -> ExprFunction {
    ExprFunction::parse(&["x1^2 - x2^2", "2*x1*x2"], &["x1", "x2"]).unwrap()
}

#[test]
fn complex_square_at_the_seed() {
    let inv = build_inverse(&complex_square(), &[1.0, 1.0], &SystemOptions::default()).unwrap();
    assert_eq!(inv.q(), &[0.0, 2.0]);
    assert_eq!(inv.system().depth(), 2);
    let x = inv.invert_at(&[0.0, 2.0]).unwrap();
    assert!((x[0] - 1.0).abs() <= 1e-9 && (x[1] - 1.0).abs() <= 1e-9);
    let jg = inv.inverse_jacobian_at(&[0.0, 2.0]).unwrap();
    let want = Matrix::from_rows(&[[0.25, 0.25], [-0.25, 0.25]]).unwrap();
    assert!(jg.max_abs_diff(&want).unwrap() <= 1e-8);
}

#[test]
fn round_trips_and_jacobian_identities() {
    let f = complex_square();
    let inv = build_inverse(&f, &[1.0, 1.0], &SystemOptions::default()).unwrap();
    let (lo, hi) = inv.y_box();
    let tol = inv.system().tol_sys();
    for y in Grid::interior(&lo, &hi, 5) {
        let r = inv.round_trip_residual(&y).unwrap();
        assert!(r.iter().all(|v| v.abs() <= tol), "{r:?} at {y:?}");

        let x = inv.invert_at(&y).unwrap();
        let back = inv.invert_at(&f.eval(&x).unwrap()).unwrap();
        assert!(x.iter().zip(&back).all(|(a, b)| (a - b).abs() <= 10.0 * tol));

        let direct = inv.inverse_jacobian_at(&y).unwrap();
        let implicit = inv.inverse_jacobian_implicit_at(&y).unwrap();
        assert!(direct.max_abs_diff(&implicit).unwrap() <= 1e-8);

        let product = f.jacobian(&x).unwrap().matmul(&direct).unwrap();
        assert!(product.max_abs_diff(&Matrix::identity(2)).unwrap() <= 1e-8);
    }
}

#[test]
fn exponential_inverse_is_the_logarithm() {
    let f = ExprFunction::parse(&["exp(x)"], &["x"]).unwrap();
    let opts = SystemOptions {
        scalar: ScalarOptions {
            half_width: 1.0,
            ..ScalarOptions::default()
        },
        ..SystemOptions::default()
    };
    let inv = build_inverse(&f, &[0.0], &opts).unwrap();
    assert!(inv.invert_at(&[1.0]).unwrap()[0].abs() <= 1e-9);
    let x = inv.invert_at(&[0.3f64.exp()]).unwrap()[0];
    assert!((x - 0.3).abs() <= 1e-9, "{x}");
}

#[test]
fn queries_outside_the_y_box_fail() {
    let inv = build_inverse(&complex_square(), &[1.0, 1.0], &SystemOptions::default()).unwrap();
    assert!(matches!(
        inv.invert_at(&[10.0, 10.0]),
        Err(dini_core::Error::OutsideBox { .. })
    ));
}
