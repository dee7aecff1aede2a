//! Runnable checks for the four preliminary facts the solvers rely on: the
//! operator-norm bound, the chain rule under affine substitution, the
//! several-variable mean value theorem, and local injectivity near a point
//! with invertible Jacobian.
//!
//! All random checks draw from a ChaCha stream seeded by the caller, so
//! reports are reproducible. They sample; they do not certify.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::ExprFunction;
use crate::linalg::{self, Matrix};

/// Slack allowed on `|Mv| ≤ ‖M‖·|v|`.
pub const OPERATOR_BOUND_SLACK: f64 = 1e-12;
/// Largest entrywise gap accepted between the two chain-rule Jacobians.
pub const CHAIN_RULE_TOL: f64 = 1e-10;
/// Target residual for mean-value witnesses.
pub const MVT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct OperatorBoundReport {
    pub trials: usize,
    pub rng_seed: u64,
    pub hs_norm: f64,
    /// Largest observed `|Mv| / (‖M‖·|v|)`; 0 for the zero matrix.
    pub max_ratio: f64,
    pub passed: bool,
}

/// Samples `trials` random vectors and checks `|Mv| ≤ ‖M‖_HS·|v|`.
pub fn check_operator_bound(m: &Matrix, trials: usize, rng_seed: u64) -> OperatorBoundReport {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let hs = m.hs_norm();
    let mut max_ratio: f64 = 0.0;
    for _ in 0..trials {
        let v: Vec<f64> = (0..m.cols()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let len = linalg::norm(&v);
        if len == 0.0 || hs == 0.0 {
            continue;
        }
        let image = m.matvec(&v).expect("vector sized to the matrix");
        max_ratio = max_ratio.max(linalg::norm(&image) / (hs * len));
    }
    OperatorBoundReport {
        trials,
        rng_seed,
        hs_norm: hs,
        max_ratio,
        passed: max_ratio <= 1.0 + OPERATOR_BOUND_SLACK,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainRuleReport {
    pub samples: usize,
    pub max_discrepancy: f64,
    pub passed: bool,
}

/// Compares `JG(x)` for `G(x) = F(y + Mx)` computed two ways: by
/// differentiating the substituted expression, and as `JF(y + Mx)·M`.
pub fn check_chain_rule(
    f: &ExprFunction,
    m: &Matrix,
    y: &[f64],
    samples: &[Vec<f64>],
) -> Result<ChainRuleReport> {
    let n = f.num_vars();
    if m.rows() != n || y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "function of {n} variables with a {}x{} matrix and offset of length {}",
            m.rows(),
            m.cols(),
            y.len()
        )));
    }
    if let Some(bad) = samples.iter().find(|x| x.len() != m.cols()) {
        return Err(Error::DimensionMismatch(format!(
            "sample of length {} for a {}-column matrix",
            bad.len(),
            m.cols()
        )));
    }
    let names: Vec<String> = (1..=m.cols()).map(|k| format!("w{k}")).collect();
    let composed = f.compose_affine(y, m, &names)?;
    let mut max_discrepancy: f64 = 0.0;
    for x in samples {
        let direct = composed.jacobian(x)?;
        let point = linalg::add(y, &m.matvec(x)?);
        let product = f.jacobian(&point)?.matmul(m)?;
        max_discrepancy = max_discrepancy.max(direct.max_abs_diff(&product)?);
    }
    Ok(ChainRuleReport {
        samples: samples.len(),
        max_discrepancy,
        passed: max_discrepancy <= CHAIN_RULE_TOL,
    })
}

/// `count` points uniform in `[-1, 1]^dim` from a seeded stream.
pub fn sample_cube(dim: usize, count: usize, rng_seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub found: bool,
    /// Segment parameter of the witness, `c = a + t(b − a)`.
    pub t: f64,
    pub witness: Vec<f64>,
    pub residual: f64,
    pub samples_used: usize,
}

/// Finds `c` on the segment `[a, b]` with `F(b) − F(a) = ⟨∇F(c), b − a⟩`.
///
/// Scans `g(t) = ⟨∇F(a + t(b − a)), b − a⟩ − (F(b) − F(a))` on `grid`
/// uniform points of `[0, 1]` and bisects the first sign change. If `g` is
/// negligible at every grid point, `t = 0.5` is returned.
pub fn mvt_witness(f: &ExprFunction, a: &[f64], b: &[f64], grid: usize) -> Result<WitnessReport> {
    if f.num_components() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "mean value witness needs a scalar function, got {} components",
            f.num_components()
        )));
    }
    if a.len() != f.num_vars() || b.len() != f.num_vars() {
        return Err(Error::DimensionMismatch(format!(
            "endpoints of length {} and {} for a function of {} variables",
            a.len(),
            b.len(),
            f.num_vars()
        )));
    }
    let dir = linalg::sub(b, a);
    if linalg::norm(&dir) == 0.0 {
        return Err(Error::Config("segment endpoints must differ".into()));
    }
    let rise = f.eval(b)?[0] - f.eval(a)?[0];
    let at = |t: f64| -> Vec<f64> { a.iter().zip(&dir).map(|(a, d)| a + t * d).collect() };
    let g = |t: f64| -> Result<f64> {
        let j = f.jacobian(&at(t))?;
        Ok(linalg::dot(j.row(0), &dir) - rise)
    };

    let grid = grid.max(2);
    let ts: Vec<f64> = (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect();
    let values = ts.iter().map(|&t| g(t)).collect::<Result<Vec<_>>>()?;
    let mut evaluations = grid;
    let report = |t: f64, residual: f64, evaluations: usize| WitnessReport {
        found: residual <= MVT_TOL,
        t,
        witness: at(t),
        residual,
        samples_used: evaluations,
    };

    if values.iter().all(|v| v.abs() <= MVT_TOL) {
        let r = g(0.5)?.abs();
        return Ok(report(0.5, r, evaluations + 1));
    }
    for i in 0..grid {
        if values[i] == 0.0 {
            return Ok(report(ts[i], 0.0, evaluations));
        }
        if i + 1 < grid && (values[i] < 0.0) != (values[i + 1] < 0.0) && values[i + 1] != 0.0 {
            let (mut lo, mut hi) = (ts[i], ts[i + 1]);
            let rising = values[i] < 0.0;
            let mut best = (lo, values[i].abs());
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let v = g(mid)?;
                evaluations += 1;
                if v.abs() < best.1 {
                    best = (mid, v.abs());
                }
                if v.abs() <= MVT_TOL {
                    break;
                }
                if (v < 0.0) == rising {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(report(best.0, best.1, evaluations));
        }
    }
    let min_abs = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min_abs <= MVT_TOL {
        let i = values.iter().position(|v| v.abs() == min_abs).unwrap_or(0);
        return Ok(report(ts[i], min_abs, evaluations));
    }
    Err(Error::NoSignChange { min_abs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectivityOptions {
    pub initial_radius: f64,
    /// Mixed-row determinant samples per radius.
    pub determinant_samples: usize,
    /// Direct `F(a) ≠ F(b)` pairs per radius.
    pub pair_samples: usize,
    pub min_radius: f64,
    pub rng_seed: u64,
}

impl Default for InjectivityOptions {
    fn default() -> Self {
        Self {
            initial_radius: 0.5,
            determinant_samples: 2000,
            pair_samples: 2000,
            min_radius: 1e-8,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityReport {
    pub radius: f64,
    pub det_at_p: f64,
    pub halvings: usize,
    pub determinant_samples: usize,
    /// Smallest `|det|` among the mixed-row matrices at the returned radius.
    pub min_abs_det: f64,
    pub pair_samples: usize,
    /// Smallest `|F(a) − F(b)| / |a − b|` among the sampled pairs.
    pub min_separation_ratio: f64,
    pub rng_seed: u64,
    /// Always false: the radius is a sampling estimate.
    pub certifying: bool,
}

/// Smallest accepted mixed-row determinant magnitude.
const MIN_DET: f64 = 1e-12;
/// Smallest accepted `|F(a) − F(b)| / |a − b|`.
const MIN_SEPARATION: f64 = 1e-12;

fn sample_ball(rng: &mut ChaCha8Rng, center: &[f64], r: f64) -> Vec<f64> {
    let n = center.len();
    // Box–Muller for a uniform direction, then radius r·u^(1/n).
    let mut dir: Vec<f64> = (0..n)
        .map(|_| {
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
        })
        .collect();
    let len = linalg::norm(&dir);
    if len == 0.0 {
        dir = vec![0.0; n];
        dir[0] = 1.0;
    }
    let scale = r * rng.random::<f64>().powf(1.0 / n as f64) / len.max(f64::MIN_POSITIVE);
    center.iter().zip(&dir).map(|(c, d)| c + scale * d).collect()
}

/// Estimates a radius `r` on which `F` is injective around `p`.
///
/// For each candidate radius, starting at `initial_radius` and halving, two
/// sampled checks must pass: every mixed-row matrix whose row `i` is `∇Fᵢ`
/// at its own random point of `B(p; r)` has a determinant of the same sign
/// as `det JF(p)` and magnitude at least `1e-12`; and random pairs `a ≠ b`
/// in the ball satisfy `|F(a) − F(b)| > 1e-12·|a − b|`.
pub fn injectivity_radius(
    f: &ExprFunction,
    p: &[f64],
    opts: &InjectivityOptions,
) -> Result<InjectivityReport> {
    let n = f.num_vars();
    if f.num_components() != n {
        return Err(Error::NotSquare {
            rows: f.num_components(),
            cols: n,
        });
    }
    if p.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "point of length {} for a function of {n} variables",
            p.len()
        )));
    }
    let jp = f.jacobian(p)?;
    let det_at_p = jp.det()?;
    if jp.inverse().is_err() {
        return Err(Error::DegenerateJacobian { det: det_at_p });
    }
    let sign = det_at_p.signum();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let mut r = opts.initial_radius;
    let mut halvings = 0;
    while r >= opts.min_radius {
        if let Some(min_abs_det) = mixed_determinants_ok(f, p, r, sign, opts.determinant_samples, &mut rng) {
            if let Some(min_separation_ratio) = pairs_separated(f, p, r, opts.pair_samples, &mut rng) {
                return Ok(InjectivityReport {
                    radius: r,
                    det_at_p,
                    halvings,
                    determinant_samples: opts.determinant_samples,
                    min_abs_det,
                    pair_samples: opts.pair_samples,
                    min_separation_ratio,
                    rng_seed: opts.rng_seed,
                    certifying: false,
                });
            }
        }
        r *= 0.5;
        halvings += 1;
    }
    Err(Error::RadiusUnderflow {
        floor: opts.min_radius,
    })
}

fn mixed_determinants_ok(
    f: &ExprFunction,
    p: &[f64],
    r: f64,
    sign: f64,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Option<f64> {
    let n = p.len();
    let mut min_abs = f64::INFINITY;
    for _ in 0..samples {
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let c = sample_ball(rng, p, r);
            let j = f.jacobian(&c).ok()?;
            rows.push(j.row(i).to_vec());
        }
        let det = Matrix::from_rows(&rows).ok()?.det().ok()?;
        if det * sign <= 0.0 || det.abs() < MIN_DET {
            return None;
        }
        min_abs = min_abs.min(det.abs());
    }
    Some(min_abs)
}

fn pairs_separated(
    f: &ExprFunction,
    p: &[f64],
    r: f64,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Option<f64> {
    let mut min_ratio = f64::INFINITY;
    let mut accepted = 0;
    while accepted < samples {
        let a = sample_ball(rng, p, r);
        let b = sample_ball(rng, p, r);
        let gap = linalg::norm(&linalg::sub(&a, &b));
        if gap == 0.0 {
            continue;
        }
        accepted += 1;
        let fa = f.eval(&a).ok()?;
        let fb = f.eval(&b).ok()?;
        let ratio = linalg::norm(&linalg::sub(&fa, &fb)) / gap;
        if ratio <= MIN_SEPARATION {
            return None;
        }
        min_ratio = min_ratio.min(ratio);
    }
    Some(min_ratio)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_bound_examples() {
        let id = check_operator_bound(&Matrix::identity(2), 500, 3);
        assert!(id.passed);
        assert!((id.max_ratio - 0.5f64.sqrt()).abs() < 1e-12);
        let zero = check_operator_bound(&Matrix::zeros(2, 3), 100, 3);
        assert!(zero.passed && zero.max_ratio == 0.0);
        let e1 = Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0]]).unwrap();
        let r = check_operator_bound(&e1, 2000, 4);
        assert!(r.passed && r.max_ratio > 0.99);
    }

    #[test]
    fn chain_rule_examples() {
        let f = ExprFunction::parse(&["x1^2 + x2"], &["x1", "x2"]).unwrap();
        let m = Matrix::from_rows(&[[2.0], [0.0]]).unwrap();
        let samples = vec![vec![0.0], vec![0.5], vec![-1.25]];
        let r = check_chain_rule(&f, &m, &[0.0, 1.0], &samples).unwrap();
        assert!(r.passed && r.max_discrepancy <= 1e-12);
        let id = check_chain_rule(&f, &Matrix::identity(2), &[0.0, 0.0], &[vec![0.3, 0.4]]).unwrap();
        assert_eq!(id.max_discrepancy, 0.0);
        assert!(matches!(
            check_chain_rule(&f, &Matrix::identity(3), &[0.0, 0.0], &[]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn mvt_examples() {
        let sq = ExprFunction::parse(&["x^2"], &["x"]).unwrap();
        let w = mvt_witness(&sq, &[0.0], &[1.0], 1024).unwrap();
        assert!(w.found && w.t == 0.5 && w.witness == vec![0.5]);

        let affine = ExprFunction::parse(&["2*x + 1"], &["x"]).unwrap();
        let w = mvt_witness(&affine, &[0.0], &[1.0], 1024).unwrap();
        assert_eq!((w.t, w.residual), (0.5, 0.0));

        let cube = ExprFunction::parse(&["x^3"], &["x"]).unwrap();
        let w = mvt_witness(&cube, &[0.0], &[1.0], 1024).unwrap();
        assert!(w.found && w.residual <= MVT_TOL);
        assert!((w.witness[0] - 1.0 / 3f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn mvt_reports_missing_sign_change() {
        // g oscillates far below the grid spacing and stays positive on it.
        let f = ExprFunction::parse(&["x + 1e-3*sin(2048*3.141592653589793*x)"], &["x"]).unwrap();
        let res = mvt_witness(&f, &[0.0], &[1.0], 3);
        assert!(matches!(res, Err(Error::NoSignChange { .. })), "{res:?}");
    }

    #[test]
    fn injectivity_examples() {
        let lin = ExprFunction::parse(&["2*x1 + x2", "x1 - x2"], &["x1", "x2"]).unwrap();
        let r = injectivity_radius(&lin, &[0.0, 0.0], &InjectivityOptions::default()).unwrap();
        assert_eq!(r.radius, 0.5);
        assert!(!r.certifying);

        let sq = ExprFunction::parse(&["x1^2"], &["x1"]).unwrap();
        let r = injectivity_radius(&sq, &[1.0], &InjectivityOptions::default()).unwrap();
        assert!(r.radius < 1.0 && r.radius > 0.0);
        let opts = InjectivityOptions {
            initial_radius: 2.0,
            ..InjectivityOptions::default()
        };
        let r = injectivity_radius(&sq, &[1.0], &opts).unwrap();
        // The open ball of radius 1 around 1 excludes the critical point 0.
        assert_eq!(r.radius, 1.0);

        let singular = ExprFunction::parse(&["x1 + x2", "x1 + x2"], &["x1", "x2"]).unwrap();
        assert!(matches!(
            injectivity_radius(&singular, &[0.0, 0.0], &InjectivityOptions::default()),
            Err(Error::DegenerateJacobian { .. })
        ));
    }

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let s = sample_ball(&mut rng, &[1.0, -2.0, 0.5], 0.25);
            assert!(linalg::norm(&linalg::sub(&s, &[1.0, -2.0, 0.5])) <= 0.25);
        }
    }
}
