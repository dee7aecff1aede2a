use dini_core::verify::{
    check_chain_rule, check_operator_bound, injectivity_radius, mvt_witness, InjectivityOptions,
};
use dini_core::{ExprFunction, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random_range(-2.0..2.0)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

#[test]
fn operator_bound_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..1000 {
        let (r, c) = (rng.random_range(1..=5), rng.random_range(1..=5));
        let m = random_matrix(&mut rng, r, c);
        let report = check_operator_bound(&m, 50, k);
        assert!(report.passed, "{report:?}");
    }
}

#[test]
fn chain_rule_on_random_triples() {
    let pool = [
        ("x1^2 + x2", "sin(x1)*x2 - exp(x2/3)"),
        ("x1*x2*x3 + cos(x3)", "x1^3 - x2 + sqrt(x3^2 + 1)"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for t in 0..100 {
        let (a, b) = pool[t % 2];
        let n = if t % 2 == 0 { 2 } else { 3 };
        let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let f = ExprFunction::parse(&[a, b], &vars).unwrap();
        let k = rng.random_range(1..=3);
        let m = random_matrix(&mut rng, n, k);
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let samples: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..k).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let report = check_chain_rule(&f, &m, &y, &samples).unwrap();
        assert!(report.passed && report.max_discrepancy <= 1e-10, "{report:?}");
    }
}

#[test]
fn mean_value_witness_for_cube() {
    let f = ExprFunction::parse(&["x^3"], &["x"]).unwrap();
    let w = mvt_witness(&f, &[0.0], &[1.0], 1024).unwrap();
    assert!(w.found);
    assert!((w.witness[0] - 1.0 / 3f64.sqrt()).abs() <= 1e-8);
}

#[test]
fn mean_value_witness_in_two_variables() {
    let f = ExprFunction::parse(&["x*y + sin(x)"], &["x", "y"]).unwrap();
    let (a, b) = ([0.0, 0.5], [1.0, -0.5]);
    let w = mvt_witness(&f, &a, &b, 1024).unwrap();
    let grad = f.jacobian(&w.witness).unwrap();
    let rise = f.eval(&b).unwrap()[0] - f.eval(&a).unwrap()[0];
    let dot = grad[(0, 0)] * (b[0] - a[0]) + grad[(0, 1)] * (b[1] - a[1]);
    assert!(w.found && (dot - rise).abs() <= 1e-10);
}

#[test]
fn complex_square_is_locally_injective() {
    let f = ExprFunction::parse(&["x1^2 - x2^2", "2*x1*x2"], &["x1", "x2"]).unwrap();
    let report = injectivity_radius(&f, &[1.0, 1.0], &InjectivityOptions::default()).unwrap();
    assert!(report.radius > 0.0);
    assert_eq!(report.pair_samples, 2000);
    assert!(report.min_separation_ratio > 1e-12);
    // Same seed, same report.
    let again = injectivity_radius(&f, &[1.0, 1.0], &InjectivityOptions::default()).unwrap();
    assert_eq!(report.radius, again.radius);
    assert_eq!(report.min_abs_det, again.min_abs_det);
}
