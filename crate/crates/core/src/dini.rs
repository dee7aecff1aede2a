//! Systems `F(x, y) = 0` with `y ∈ ℝᵐ`, solved by induction on `m`.
//!
//! At each level the dependent block is first reparametrized as
//! `y = b + J⁻¹(z − b)` with `J = ∂F/∂y(a, b)`, so the normalized map `G`
//! has `∂G/∂z(a; b) = I`. The first normalized equation `G₁(x; z₁; z′) = 0`
//! is then a scalar problem for `z₁ = φ(x, z′)` with `(x, z′)` independent.
//! Substituting `φ` into the remaining equations gives a system of size
//! `m − 1` in the unknowns `z′`, which is solved the same way. The base
//! case `m = 1` is the scalar solver applied to `F` directly.
//!
//! Evaluating a level costs one bisection per evaluation of the level below,
//! so the total cost grows like `iterᵐ`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::ExprFunction;
use crate::linalg::{self, Matrix};
use crate::map::{reparametrize_tail, ScalarSlice, SmoothMap};
use crate::point::SplitPoint;
use crate::scalar::{ImplicitSolution, ScalarOptions, SolutionBox};

/// Fraction of a parent box's half-width offered to the level below.
const NESTED_MARGIN: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemOptions {
    pub scalar: ScalarOptions,
    /// Componentwise residual accepted for a system solution.
    pub tol_sys: f64,
    /// Largest number of dependent variables accepted.
    pub max_dependent: usize,
    /// Newton steps used to polish each sample in [`SystemSolution::verify_uniqueness`].
    pub polish_steps: usize,
}

impl Default for SystemOptions {
    fn default() -> Self {
        Self {
            scalar: ScalarOptions::default(),
            tol_sys: 1e-9,
            max_dependent: 6,
            polish_steps: 25,
        }
    }
}

/// `(x; z′) ↦ G₂…ₘ(x; φ(x, z′); z′)`: the normalized system with its first
/// unknown eliminated through the implicit function `φ`.
#[derive(Debug)]
struct Reduced {
    normalized: Arc<dyn SmoothMap>,
    phi: Arc<ImplicitSolution>,
    n: usize,
    m: usize,
}

impl Reduced {
    fn full_point(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.num_inputs() {
            return Err(Error::DimensionMismatch(format!(
                "reduced map of {} inputs evaluated at a point of length {}",
                self.num_inputs(),
                p.len()
            )));
        }
        let z1 = self.phi.solve_at(p)?;
        let mut full = Vec::with_capacity(p.len() + 1);
        full.extend_from_slice(&p[..self.n]);
        full.push(z1);
        full.extend_from_slice(&p[self.n..]);
        Ok(full)
    }
}

impl SmoothMap for Reduced {
    fn num_inputs(&self) -> usize {
        self.n + self.m - 1
    }

    fn num_outputs(&self) -> usize {
        self.m - 1
    }

    fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        let full = self.full_point(p)?;
        Ok(self.normalized.eval(&full)?.split_off(1))
    }

    fn jacobian(&self, p: &[f64]) -> Result<Matrix> {
        let full = self.full_point(p)?;
        let j = self.normalized.jacobian(&full)?;
        let n = self.n;
        let d1 = j[(0, n)];
        if d1 == 0.0 {
            return Err(Error::DegenerateDerivative { value: d1 });
        }
        // Column c of the reduced inputs is column c (x block) or c + 1 (z′ block) of G.
        let col = |c: usize| if c < n { c } else { c + 1 };
        let mut out = Matrix::zeros(self.num_outputs(), self.num_inputs());
        for i in 1..self.m {
            for c in 0..self.num_inputs() {
                let dphi = -j[(0, col(c))] / d1;
                out[(i - 1, c)] = j[(i, col(c))] + j[(i, n)] * dphi;
            }
        }
        Ok(out)
    }
}

#[derive(Debug)]
enum Stage {
    Base(ImplicitSolution),
    Nested {
        phi: Arc<ImplicitSolution>,
        reduced: Box<SystemSolution>,
    },
}

/// The implicit function `f` with `F(x, f(x)) = 0` near the seed.
#[derive(Debug)]
pub struct SystemSolution {
    map: Arc<dyn SmoothMap>,
    seed: SplitPoint,
    /// `J⁻¹`, mapping normalized offsets back to `y` (identity when `m = 1`).
    normalizer: Matrix,
    /// `J`, the inverse of `normalizer`.
    denormalizer: Matrix,
    level: usize,
    tol_sys: f64,
    polish_steps: usize,
    stage: Stage,
}

/// Returns `(G, J⁻¹)` with `G(x; z) = F(x; b + J⁻¹(z − b))` and `J = ∂F/∂y(a, b)`.
pub fn normalize(f: &ExprFunction, seed: &SplitPoint) -> Result<(ExprFunction, Matrix)> {
    check_system_layout(f, seed)?;
    let (_, fy) = f.jacobian_split(seed)?;
    let j_inv = fy.inverse()?;
    let g = reparametrize_tail(Arc::new(f.clone()), &seed.y, &j_inv)?;
    let g = g
        .as_expr()
        .cloned()
        .expect("expression maps reparametrize to expressions");
    Ok((g, j_inv))
}

fn check_system_layout(map: &dyn SmoothMap, seed: &SplitPoint) -> Result<()> {
    let (n, m) = (seed.n(), seed.m());
    if m == 0 || map.num_outputs() != m || map.num_inputs() != n + m {
        return Err(Error::DimensionMismatch(format!(
            "system with split ({n}, {m}) needs a {}→{m} map, got {}→{}",
            n + m,
            map.num_inputs(),
            map.num_outputs()
        )));
    }
    Ok(())
}

/// Builds the nested solver for an expression system.
pub fn build_system(
    f: &ExprFunction,
    seed: SplitPoint,
    opts: &SystemOptions,
) -> Result<SystemSolution> {
    SystemSolution::build(Arc::new(f.clone()), seed, opts)
}

impl SystemSolution {
    pub fn build(map: Arc<dyn SmoothMap>, seed: SplitPoint, opts: &SystemOptions) -> Result<Self> {
        if !(opts.tol_sys.is_finite() && opts.tol_sys > 0.0) {
            return Err(Error::Config("tol_sys must be positive and finite".into()));
        }
        Self::build_level(map, seed, opts, 0, None)
    }

    fn build_level(
        map: Arc<dyn SmoothMap>,
        seed: SplitPoint,
        opts: &SystemOptions,
        level: usize,
        caps: Option<Vec<f64>>,
    ) -> Result<Self> {
        check_system_layout(map.as_ref(), &seed)?;
        let (n, m) = (seed.n(), seed.m());
        if m > opts.max_dependent {
            return Err(Error::Config(format!(
                "{m} dependent variables exceed the configured limit of {}",
                opts.max_dependent
            )));
        }
        let flat = seed.to_flat();
        let residual = linalg::max_abs(&map.eval(&flat)?);
        if residual > opts.scalar.tol_seed {
            return Err(Error::SeedNotOnZeroSet {
                residual,
                tolerance: opts.scalar.tol_seed,
            });
        }

        let common = |stage, normalizer: Matrix, denormalizer: Matrix, map, seed| Self {
            map,
            seed,
            normalizer,
            denormalizer,
            level,
            tol_sys: opts.tol_sys,
            polish_steps: opts.polish_steps,
            stage,
        };

        if m == 1 {
            let base = ImplicitSolution::at_level(map.clone(), seed.clone(), &opts.scalar, level, caps.as_deref())?;
            return Ok(common(
                Stage::Base(base),
                Matrix::identity(1),
                Matrix::identity(1),
                map,
                seed,
            ));
        }

        let j = map.jacobian(&flat)?.columns(n, n + m);
        let j_inv = j.inverse()?;
        let normalized = reparametrize_tail(map.clone(), &seed.y, &j_inv)?;

        // φ solves G₁(x; z₁; z′) = 0 for z₁ with (x, z′) independent.
        let slice = ScalarSlice::new(normalized.clone(), 0, n)?;
        let mut indep = seed.x.clone();
        indep.extend_from_slice(&seed.y[1..]);
        let phi_seed = SplitPoint::new(indep, vec![seed.y[0]]);
        let phi_caps = caps.map(|c| {
            // |y − b| ≤ ‖J⁻¹‖_∞ |z − b|_∞ keeps the caps of the caller's y axes.
            let r = (0..m)
                .map(|i| c[n + i] / j_inv.row(i).iter().map(|v| v.abs()).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            let mut out = c[..n].to_vec();
            out.extend(std::iter::repeat_n(r, m));
            out
        });
        let phi = Arc::new(ImplicitSolution::at_level(
            Arc::new(slice),
            phi_seed,
            &opts.scalar,
            level,
            phi_caps.as_deref(),
        )?);
        // The next level evaluates φ on its closed box, which must sit inside φ's open X.
        let reduced_caps: Vec<f64> = {
            let bx = phi.solution_box();
            bx.x_lo
                .iter()
                .zip(&bx.x_hi)
                .map(|(lo, hi)| 0.5 * (hi - lo) * NESTED_MARGIN)
                .collect()
        };

        let reduced_map = Reduced {
            normalized,
            phi: phi.clone(),
            n,
            m,
        };
        let reduced_seed = SplitPoint::new(seed.x.clone(), seed.y[1..].to_vec());
        let reduced = Self::build_level(
            Arc::new(reduced_map),
            reduced_seed,
            opts,
            level + 1,
            Some(reduced_caps),
        )?;

        Ok(common(
            Stage::Nested {
                phi,
                reduced: Box::new(reduced),
            },
            j_inv,
            j,
            map,
            seed,
        ))
    }

    pub fn n(&self) -> usize {
        self.seed.n()
    }

    pub fn m(&self) -> usize {
        self.seed.m()
    }

    pub fn seed(&self) -> &SplitPoint {
        &self.seed
    }

    pub fn map(&self) -> &Arc<dyn SmoothMap> {
        &self.map
    }

    pub fn tol_sys(&self) -> f64 {
        self.tol_sys
    }

    /// `J⁻¹` used to un-normalize this level (identity for `m = 1`).
    pub fn normalizer(&self) -> &Matrix {
        &self.normalizer
    }

    /// Recursion level of this solution; 0 for the outermost.
    pub fn level(&self) -> usize {
        self.level
    }

    /// Number of nested levels, equal to `m`.
    pub fn depth(&self) -> usize {
        match &self.stage {
            Stage::Base(_) => 1,
            Stage::Nested { reduced, .. } => 1 + reduced.depth(),
        }
    }

    /// The scalar boxes of every level, outermost first.
    pub fn boxes(&self) -> Vec<SolutionBox> {
        match &self.stage {
            Stage::Base(s) => vec![s.solution_box().clone()],
            Stage::Nested { phi, reduced } => {
                let mut out = vec![phi.solution_box().clone()];
                out.extend(reduced.boxes());
                out
            }
        }
    }

    /// Intersection of the `x` ranges of every level.
    pub fn independent_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        match &self.stage {
            Stage::Base(s) => {
                let b = s.solution_box();
                (b.x_lo.clone(), b.x_hi.clone())
            }
            Stage::Nested { phi, reduced } => {
                let b = phi.solution_box();
                let (lo, hi) = reduced.independent_box();
                (
                    (0..n).map(|k| b.x_lo[k].max(lo[k])).collect(),
                    (0..n).map(|k| b.x_hi[k].min(hi[k])).collect(),
                )
            }
        }
    }

    /// Box for the normalized unknowns `z`: the `φ` interval for `z₁`
    /// times the `φ` box ranges of `z′`.
    pub fn normalized_dependent_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let b = match &self.stage {
            Stage::Base(s) => s.solution_box(),
            Stage::Nested { phi, .. } => phi.solution_box(),
        };
        let mut lo = vec![b.y_lo];
        let mut hi = vec![b.y_hi];
        lo.extend_from_slice(&b.x_lo[n..]);
        hi.extend_from_slice(&b.x_hi[n..]);
        (lo, hi)
    }

    /// Axis-aligned hull, in `y` coordinates, of the normalized dependent box
    /// mapped through `J⁻¹`.
    pub fn dependent_box(&self) -> (Vec<f64>, Vec<f64>) {
        let (lo, hi) = self.normalized_dependent_box();
        let b = &self.seed.y;
        let m = self.m();
        let (mut out_lo, mut out_hi) = (b.clone(), b.clone());
        for i in 0..m {
            for k in 0..m {
                let w = self.normalizer[(i, k)];
                let (a, c) = (w * (lo[k] - b[k]), w * (hi[k] - b[k]));
                out_lo[i] += a.min(c);
                out_hi[i] += a.max(c);
            }
        }
        (out_lo, out_hi)
    }

    fn to_y(&self, z: &[f64]) -> Result<Vec<f64>> {
        let b = &self.seed.y;
        let moved = self.normalizer.matvec(&linalg::sub(z, b))?;
        Ok(linalg::add(b, &moved))
    }

    fn to_z(&self, y: &[f64]) -> Result<Vec<f64>> {
        let b = &self.seed.y;
        let moved = self.denormalizer.matvec(&linalg::sub(y, b))?;
        Ok(linalg::add(b, &moved))
    }

    /// Whether `y` lies in the dependent box, mapped through the normalizer.
    pub fn contains_dependent(&self, y: &[f64]) -> bool {
        let (lo, hi) = self.normalized_dependent_box();
        match self.to_z(y) {
            Ok(z) => z
                .iter()
                .zip(lo.iter().zip(&hi))
                .all(|(v, (l, h))| l <= v && v <= h),
            Err(_) => false,
        }
    }

    /// `y = f(x)` by nested bisection.
    pub fn solve_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} independent coordinates, got {}",
                self.n(),
                x.len()
            )));
        }
        match &self.stage {
            Stage::Base(s) => Ok(vec![s.solve_at(x)?]),
            Stage::Nested { phi, reduced } => {
                let z_rest = reduced.solve_at(x)?;
                let mut p = x.to_vec();
                p.extend_from_slice(&z_rest);
                let mut z = vec![phi.solve_at(&p)?];
                z.extend(z_rest);
                self.to_y(&z)
            }
        }
    }

    /// `Jf(x) = −[∂F/∂y]⁻¹ ∂F/∂x` at `(x, f(x))`, an `m × n` matrix.
    pub fn jacobian_at(&self, x: &[f64]) -> Result<Matrix> {
        let y = self.solve_at(x)?;
        let (n, m) = (self.n(), self.m());
        let mut p = x.to_vec();
        p.extend_from_slice(&y);
        let j = self.map.jacobian(&p)?;
        let fx = j.columns(0, n);
        let fy = j.columns(n, n + m);
        Ok(fy.solve_matrix(&fx)?.scaled(-1.0))
    }

    /// Residual `F(x, f(x))`.
    pub fn residual_at(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let mut p = x.to_vec();
        p.extend_from_slice(y);
        self.map.eval(&p)
    }

    /// Sampling check that `f(x)` is the only zero of `F(x, ·)` in the
    /// dependent box.
    ///
    /// With one unknown the interval is scanned at `samples` uniform points
    /// and every sign change refined. With several, `samples` uniform random
    /// points of the box are drawn; each is recorded as a raw hit when
    /// `|F| ≤ tol_sys` and then polished by Newton steps that must stay in
    /// the box. Passes iff every zero found lies within `10·tol_sys` of `f(x)`.
    /// Sampling cannot prove uniqueness.
    pub fn verify_uniqueness(&self, x: &[f64], samples: usize, rng_seed: u64) -> Result<UniquenessReport> {
        let solution = self.solve_at(x)?;
        let radius = 10.0 * self.tol_sys;
        let mut raw_hits = Vec::new();
        let mut zeros = Vec::new();
        let method;
        match &self.stage {
            Stage::Base(s) => {
                method = "sign-change scan";
                zeros.extend(s.scan_zeros(x, samples)?.into_iter().map(|y| vec![y]));
            }
            Stage::Nested { .. } => {
                method = "random sampling with Newton polishing";
                let (lo, hi) = self.normalized_dependent_box();
                let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
                for _ in 0..samples {
                    let z: Vec<f64> = lo
                        .iter()
                        .zip(&hi)
                        .map(|(l, h)| rng.random_range(*l..=*h))
                        .collect();
                    let y = self.to_y(&z)?;
                    if let Ok(r) = self.residual_at(x, &y) {
                        if linalg::max_abs(&r) <= self.tol_sys {
                            raw_hits.push(y.clone());
                        }
                    }
                    if let Some(root) = self.polish(x, y) {
                        zeros.push(root);
                    }
                }
            }
        }

        let mut clusters: Vec<Vec<f64>> = Vec::new();
        for z in zeros.iter().chain(&raw_hits) {
            if !clusters.iter().any(|c| max_dist(c, z) <= radius) {
                clusters.push(z.clone());
            }
        }
        let max_distance = zeros
            .iter()
            .chain(&raw_hits)
            .map(|z| max_dist(z, &solution))
            .fold(0.0, f64::max);
        Ok(UniquenessReport {
            query: x.to_vec(),
            solution,
            method,
            samples,
            rng_seed,
            raw_hits: raw_hits.len(),
            zeros_found: zeros.len(),
            passed: max_distance <= radius,
            clusters,
            max_distance,
        })
    }

    fn polish(&self, x: &[f64], mut y: Vec<f64>) -> Option<Vec<f64>> {
        let n = self.n();
        let m = self.m();
        let mut p = x.to_vec();
        p.extend_from_slice(&y);
        for _ in 0..self.polish_steps {
            let r = self.map.eval(&p).ok()?;
            if linalg::max_abs(&r) <= 1e-3 * self.tol_sys {
                break;
            }
            let fy = self.map.jacobian(&p).ok()?.columns(n, n + m);
            let step = fy.solve(&r).ok()?;
            y = linalg::sub(&y, &step);
            if !self.contains_dependent(&y) {
                return None;
            }
            p[n..].copy_from_slice(&y);
            if linalg::norm(&step) <= 1e-15 * (1.0 + linalg::norm(&y)) {
                break;
            }
        }
        let r = self.map.eval(&p).ok()?;
        (linalg::max_abs(&r) <= self.tol_sys).then_some(y)
    }
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    linalg::max_abs(&linalg::sub(a, b))
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub query: Vec<f64>,
    pub solution: Vec<f64>,
    pub method: &'static str,
    pub samples: usize,
    pub rng_seed: u64,
    /// Samples whose raw residual was already within `tol_sys`.
    pub raw_hits: usize,
    pub zeros_found: usize,
    /// One representative per group of zeros within `10·tol_sys` of each other.
    pub clusters: Vec<Vec<f64>>,
    pub max_distance: f64,
    pub passed: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> ExprFunction {
        ExprFunction::parse(
            &["y1^2 + y2 - x - 1", "y1 + y2^2 - x - 1"],
            &["x", "y1", "y2"],
        )
        .unwrap()
    }

    fn pair_seed() -> SplitPoint {
        SplitPoint::new(vec![1.0], vec![1.0, 1.0])
    }

    #[test]
    fn normalize_identity_is_noop() {
        let f = ExprFunction::parse(&["y1 + x*y2^2", "y2 - x"], &["x", "y1", "y2"]).unwrap();
        let seed = SplitPoint::new(vec![0.0], vec![0.0, 0.0]);
        let (g, j_inv) = normalize(&f, &seed).unwrap();
        assert_eq!(j_inv, Matrix::identity(2));
        assert_eq!(g.components(), f.components());
    }

    #[test]
    fn dependent_box_contains_the_solutions() {
        let sys = build_system(&pair(), pair_seed(), &SystemOptions::default()).unwrap();
        let (lo, hi) = sys.dependent_box();
        for x in [0.8, 1.0, 1.2] {
            let y = sys.solve_at(&[x]).unwrap();
            assert!((0..2).all(|i| lo[i] <= y[i] && y[i] <= hi[i]), "{y:?} not in {lo:?}..{hi:?}");
        }
    }

    #[test]
    fn normalize_diagonal() {
        let f = ExprFunction::parse(&["2*y1", "3*y2"], &["y1", "y2"]).unwrap();
        let seed = SplitPoint::new(vec![], vec![0.0, 0.0]);
        let (g, j_inv) = normalize(&f, &seed).unwrap();
        assert_eq!(j_inv.to_rows(), vec![vec![0.5, 0.0], vec![0.0, 1.0 / 3.0]]);
        let v = g.eval(&[0.7, -0.2]).unwrap();
        assert!((v[0] - 0.7).abs() < 1e-15 && (v[1] + 0.2).abs() < 1e-15);
        let jg = g.jacobian(&[0.0, 0.0]).unwrap();
        assert!(jg.max_abs_diff(&Matrix::identity(2)).unwrap() < 1e-15);
    }

    #[test]
    fn normalize_gives_identity_block_and_same_seed_value() {
        let f = pair();
        let seed = pair_seed();
        let (g, _) = normalize(&f, &seed).unwrap();
        let (_, gz) = g.jacobian_split(&seed).unwrap();
        assert!(gz.max_abs_diff(&Matrix::identity(2)).unwrap() < 1e-10);
        assert_eq!(g.eval(&seed.to_flat()).unwrap(), f.eval(&seed.to_flat()).unwrap());
    }

    #[test]
    fn normalize_rejects_singular_block() {
        let f = ExprFunction::parse(&["y1 + y2", "y1 + y2"], &["y1", "y2"]).unwrap();
        let seed = SplitPoint::new(vec![], vec![0.0, 0.0]);
        assert!(matches!(normalize(&f, &seed), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn quadratic_pair_at_seed() {
        let sys = build_system(&pair(), pair_seed(), &SystemOptions::default()).unwrap();
        assert_eq!(sys.depth(), 2);
        let y = sys.solve_at(&[1.0]).unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9 && (y[1] - 1.0).abs() < 1e-9, "{y:?}");
        let jf = sys.jacobian_at(&[1.0]).unwrap();
        assert!((jf[(0, 0)] - 1.0 / 3.0).abs() < 1e-8);
        assert!((jf[(1, 0)] - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn singular_seed_block() {
        let f = ExprFunction::parse(&["2*y1 + 2*y2 - x", "y1 + y2 - x"], &["x", "y1", "y2"]).unwrap();
        let err = build_system(&f, SplitPoint::new(vec![0.0], vec![0.0, 0.0]), &SystemOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { .. }));
    }

    #[test]
    fn off_seed_is_rejected() {
        let err = build_system(
            &pair(),
            SplitPoint::new(vec![1.0], vec![1.0, 1.1]),
            &SystemOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::SeedNotOnZeroSet { .. }));
    }

    #[test]
    fn linear_system_matches_closed_form() {
        // F = A x + B y with B invertible: f(x) = −B⁻¹ A x.
        let f = ExprFunction::parse(
            &["x1 - 2*x2 + 3*y1 + y2", "0.5*x1 + x2 - y1 + 2*y2"],
            &["x1", "x2", "y1", "y2"],
        )
        .unwrap();
        let sys = build_system(&f, SplitPoint::new(vec![0.0, 0.0], vec![0.0, 0.0]), &SystemOptions::default())
            .unwrap();
        let a = Matrix::from_rows(&[[1.0, -2.0], [0.5, 1.0]]).unwrap();
        let b = Matrix::from_rows(&[[3.0, 1.0], [-1.0, 2.0]]).unwrap();
        let expected_j = b.solve_matrix(&a).unwrap().scaled(-1.0);
        for x in [[0.02, -0.04], [0.0, 0.0], [-0.03, 0.01]] {
            let y = sys.solve_at(&x).unwrap();
            let want = expected_j.matvec(&x).unwrap();
            assert!(linalg::max_abs(&linalg::sub(&y, &want)) < 1e-10, "{y:?} vs {want:?}");
            let jf = sys.jacobian_at(&x).unwrap();
            assert!(jf.max_abs_diff(&expected_j).unwrap() < 1e-12);
        }
    }

    #[test]
    fn single_equation_matches_scalar_solver() {
        let circle = ExprFunction::parse(&["x^2 + y^2 - 1"], &["x", "y"]).unwrap();
        let seed = SplitPoint::new(vec![0.0], vec![1.0]);
        let opts = SystemOptions::default();
        let sys = build_system(&circle, seed.clone(), &opts).unwrap();
        let scalar = ImplicitSolution::from_expr(&circle, seed, &opts.scalar).unwrap();
        for x in [-0.3, 0.0, 0.2] {
            assert_eq!(sys.solve_at(&[x]).unwrap(), vec![scalar.solve_at(&[x]).unwrap()]);
            assert_eq!(
                sys.jacobian_at(&[x]).unwrap().as_slice(),
                scalar.gradient_at(&[x]).unwrap().as_slice()
            );
        }
    }

    #[test]
    fn uniqueness_on_pair_and_linear() {
        let sys = build_system(&pair(), pair_seed(), &SystemOptions::default()).unwrap();
        let report = sys.verify_uniqueness(&[1.0], 2_000, 7).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.clusters.len(), 1);
        let lin = ExprFunction::parse(&["y1 + y2 - x", "y1 - y2"], &["x", "y1", "y2"]).unwrap();
        let sys = build_system(&lin, SplitPoint::new(vec![0.0], vec![0.0, 0.0]), &SystemOptions::default())
            .unwrap();
        let report = sys.verify_uniqueness(&[0.2], 500, 1).unwrap();
        assert!(report.passed && report.clusters.len() == 1, "{report:?}");
        assert!((report.clusters[0][0] - 0.1).abs() < 1e-9);
    }

    #[test]
    fn uniqueness_excludes_roots_outside_the_box() {
        let f = ExprFunction::parse(&["y^2 - x"], &["x", "y"]).unwrap();
        let sys = build_system(&f, SplitPoint::new(vec![1.0], vec![1.0]), &SystemOptions::default())
            .unwrap();
        let report = sys.verify_uniqueness(&[1.2], 10_000, 0).unwrap();
        assert!(report.passed);
        assert_eq!(report.clusters.len(), 1);
        assert!((report.clusters[0][0] - 1.2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn outside_box_reports_level() {
        let sys = build_system(&pair(), pair_seed(), &SystemOptions::default()).unwrap();
        assert!(matches!(sys.solve_at(&[50.0]), Err(Error::OutsideBox { .. })));
    }
}
