//! Scalar implicit functions: one equation `F(x, y) = 0` with `y ∈ ℝ`.
//!
//! [`find_box`] searches for an axis-aligned box `X × [y_lo, y_hi]` around
//! the seed on which `F` is strictly monotone in `y` and changes sign
//! between the bottom and top faces. Inside such a box the zero of
//! `F(x, ·)` is unique for every `x ∈ X`, and [`ImplicitSolution::solve_at`]
//! finds it by bisection. Validation samples a grid; it is not a proof.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::ExprFunction;
use crate::grid::Grid;
use crate::map::SmoothMap;
use crate::point::{join, SplitPoint};

/// Derivative magnitude below which the seed counts as degenerate.
pub const DEGENERATE_DERIVATIVE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarOptions {
    /// Largest accepted `|F(a, b)|` at the seed.
    pub tol_seed: f64,
    /// Bisection stops once the bracket is this narrow.
    pub tol_root: f64,
    pub max_iter: usize,
    /// Initial half-width of the box along every axis. A candidate whose
    /// only failure is an endpoint sign has its `X` half-widths halved;
    /// any other failure halves all of them.
    pub half_width: f64,
    /// Grid samples per axis used to validate a candidate box.
    pub grid_density: usize,
    /// How many times the box may be halved before giving up.
    pub max_shrink: usize,
}

impl Default for ScalarOptions {
    fn default() -> Self {
        Self {
            tol_seed: 1e-10,
            tol_root: 1e-12,
            max_iter: 200,
            half_width: 0.5,
            grid_density: 9,
            max_shrink: 40,
        }
    }
}

impl ScalarOptions {
    fn check(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.tol_seed) || !positive(self.tol_root) || !positive(self.half_width) {
            return Err(Error::Config(
                "tolerances and half-width must be positive and finite".into(),
            ));
        }
        if self.grid_density < 2 || self.max_iter == 0 {
            return Err(Error::Config(
                "grid density must be at least 2 and max_iter positive".into(),
            ));
        }
        Ok(())
    }
}

/// A validated monotonicity box `X × [y_lo, y_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionBox {
    pub x_lo: Vec<f64>,
    pub x_hi: Vec<f64>,
    pub y_lo: f64,
    pub y_hi: f64,
    /// Sign of `∂F/∂y` on the box, `+1.0` or `-1.0`.
    pub sign: f64,
    pub grid_density: usize,
    /// Number of failed candidates before this one.
    pub shrinks: usize,
    pub validated: bool,
}

impl SolutionBox {
    /// Strict membership in the open box `X`.
    pub fn contains_x(&self, x: &[f64]) -> bool {
        x.len() == self.x_lo.len()
            && x.iter()
                .zip(self.x_lo.iter().zip(&self.x_hi))
                .all(|(v, (lo, hi))| lo < v && v < hi)
    }
}

/// Searches for a validated box around `seed` (level 0).
pub fn find_box(map: &dyn SmoothMap, seed: &SplitPoint, opts: &ScalarOptions) -> Result<SolutionBox> {
    find_box_at_level(map, seed, opts, 0, None)
}

fn check_layout(map: &dyn SmoothMap, seed: &SplitPoint) -> Result<()> {
    if map.num_outputs() != 1 || seed.m() != 1 || map.num_inputs() != seed.n() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "scalar problem needs a {}→1 map, got {}→{} with seed split ({}, {})",
            seed.n() + 1,
            map.num_inputs(),
            map.num_outputs(),
            seed.n(),
            seed.m()
        )));
    }
    Ok(())
}

pub(crate) fn find_box_at_level(
    map: &dyn SmoothMap,
    seed: &SplitPoint,
    opts: &ScalarOptions,
    level: usize,
    caps: Option<&[f64]>,
) -> Result<SolutionBox> {
    opts.check()?;
    check_layout(map, seed)?;
    let n = seed.n();
    let flat = seed.to_flat();
    let residual = map.eval(&flat)?[0];
    if residual.abs() > opts.tol_seed {
        return Err(Error::SeedNotOnZeroSet {
            residual: residual.abs(),
            tolerance: opts.tol_seed,
        });
    }
    let dfdy = map.partial(&flat, n)?[0];
    if dfdy.abs() <= DEGENERATE_DERIVATIVE {
        return Err(Error::DegenerateDerivative { value: dfdy });
    }
    let sign = dfdy.signum();
    let b = seed.y[0];

    // The interval [b₁, b₂] is fixed first and X shrunk until the endpoint
    // signs hold; a failing derivative sign shrinks both.
    let h0 = |k: usize| caps.map_or(opts.half_width, |c| opts.half_width.min(c[k]));
    let mut hx: Vec<f64> = (0..n).map(h0).collect();
    let mut hy = h0(n);
    let mut last_failure = (flat.clone(), String::new());
    for shrinks in 0..=opts.max_shrink {
        let candidate = SolutionBox {
            x_lo: seed.x.iter().zip(&hx).map(|(a, h)| a - h).collect(),
            x_hi: seed.x.iter().zip(&hx).map(|(a, h)| a + h).collect(),
            y_lo: b - hy,
            y_hi: b + hy,
            sign,
            grid_density: opts.grid_density,
            shrinks,
            validated: false,
        };
        match validate(map, &candidate) {
            Ok(()) => {
                return Ok(SolutionBox {
                    validated: true,
                    ..candidate
                })
            }
            Err(failure) => {
                hx.iter_mut().for_each(|h| *h *= 0.5);
                if !failure.endpoint_only {
                    hy *= 0.5;
                }
                last_failure = (failure.point, failure.reason);
            }
        }
    }
    Err(Error::BoxNotFound {
        level,
        attempts: opts.max_shrink + 1,
        point: last_failure.0,
        reason: last_failure.1,
    })
}

struct Failure {
    point: Vec<f64>,
    reason: String,
    /// The derivative sign held on the whole closed box.
    endpoint_only: bool,
}

/// Checks the sign conditions on the grid; returns the first failing sample.
///
/// `∂F/∂y` is sampled on the closed box, the endpoint signs on the open `X`.
fn validate(map: &dyn SmoothMap, bx: &SolutionBox) -> Result<(), Failure> {
    let n = bx.x_lo.len();
    let sign = bx.sign;
    let fail = |point, reason, endpoint_only| Failure {
        point,
        reason,
        endpoint_only,
    };
    let mut lo = bx.x_lo.clone();
    let mut hi = bx.x_hi.clone();
    lo.push(bx.y_lo);
    hi.push(bx.y_hi);
    for p in Grid::uniform(&lo, &hi, bx.grid_density) {
        match map.partial(&p, n) {
            Ok(d) if sign * d[0] > 0.0 => {}
            Ok(d) => return Err(fail(p, format!("∂F/∂y = {:e} has the wrong sign", d[0]), false)),
            Err(e) => return Err(fail(p, e.to_string(), false)),
        }
    }
    for x in Grid::interior(&bx.x_lo, &bx.x_hi, bx.grid_density) {
        for (y, want_positive) in [(bx.y_lo, false), (bx.y_hi, true)] {
            let p = join(&x, y);
            match map.eval(&p) {
                Ok(v) if (sign * v[0] > 0.0) == want_positive && sign * v[0] != 0.0 => {}
                Ok(v) => {
                    let reason = format!("endpoint sign condition fails (F = {:e})", v[0]);
                    return Err(fail(p, reason, true));
                }
                Err(e) => return Err(fail(p, e.to_string(), false)),
            }
        }
    }
    Ok(())
}

/// The implicit function `x ↦ f(x)` defined by `F(x, f(x)) = 0` on a validated box.
#[derive(Debug, Clone)]
pub struct ImplicitSolution {
    map: Arc<dyn SmoothMap>,
    seed: SplitPoint,
    solution_box: SolutionBox,
    tol_root: f64,
    max_iter: usize,
    level: usize,
}

impl ImplicitSolution {
    pub fn new(map: Arc<dyn SmoothMap>, seed: SplitPoint, opts: &ScalarOptions) -> Result<Self> {
        Self::at_level(map, seed, opts, 0, None)
    }

    pub fn from_expr(f: &ExprFunction, seed: SplitPoint, opts: &ScalarOptions) -> Result<Self> {
        Self::new(Arc::new(f.clone()), seed, opts)
    }

    /// `level` tags errors raised by this solver when it is nested; `caps`
    /// bound the initial half-width of each input axis.
    pub(crate) fn at_level(
        map: Arc<dyn SmoothMap>,
        seed: SplitPoint,
        opts: &ScalarOptions,
        level: usize,
        caps: Option<&[f64]>,
    ) -> Result<Self> {
        let solution_box = find_box_at_level(map.as_ref(), &seed, opts, level, caps)?;
        Ok(Self {
            map,
            seed,
            solution_box,
            tol_root: opts.tol_root,
            max_iter: opts.max_iter,
            level,
        })
    }

    pub fn solution_box(&self) -> &SolutionBox {
        &self.solution_box
    }

    pub fn seed(&self) -> &SplitPoint {
        &self.seed
    }

    pub fn map(&self) -> &Arc<dyn SmoothMap> {
        &self.map
    }

    pub fn n(&self) -> usize {
        self.seed.n()
    }

    fn oriented(&self, x: &[f64], y: f64) -> Result<f64> {
        Ok(self.solution_box.sign * self.map.eval(&join(x, y))?[0])
    }

    fn require_inside(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} independent coordinates, got {}",
                self.n(),
                x.len()
            )));
        }
        if !self.solution_box.contains_x(x) {
            return Err(Error::OutsideBox {
                level: self.level,
                point: x.to_vec(),
            });
        }
        Ok(())
    }

    /// The unique `y ∈ ]y_lo, y_hi[` with `F(x, y) = 0`, by bisection.
    pub fn solve_at(&self, x: &[f64]) -> Result<f64> {
        self.require_inside(x)?;
        let (mut lo, mut hi) = (self.solution_box.y_lo, self.solution_box.y_hi);
        let f_lo = self.oriented(x, lo)?;
        let f_hi = self.oriented(x, hi)?;
        if !(f_lo < 0.0 && f_hi > 0.0) {
            return Err(Error::NoConvergence {
                level: self.level,
                reason: format!(
                    "bracket lost at x = {x:?}: oriented F = {f_lo:e} at y_lo, {f_hi:e} at y_hi"
                ),
            });
        }
        for _ in 0..self.max_iter {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= self.tol_root || mid <= lo || mid >= hi {
                return Ok(mid);
            }
            let f_mid = self.oriented(x, mid)?;
            if f_mid == 0.0 {
                return Ok(mid);
            }
            if f_mid < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NoConvergence {
            level: self.level,
            reason: format!(
                "bracket width {:e} after {} iterations",
                hi - lo,
                self.max_iter
            ),
        })
    }

    /// `∂f/∂x_j = −(∂F/∂x_j) / (∂F/∂y)` evaluated at `(x, f(x))`.
    pub fn gradient_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        let y = self.solve_at(x)?;
        let j = self.map.jacobian(&join(x, y))?;
        let n = self.n();
        let dfdy = j[(0, n)];
        if dfdy == 0.0 {
            return Err(Error::DegenerateDerivative { value: dfdy });
        }
        Ok((0..n).map(|k| -j[(0, k)] / dfdy).collect())
    }

    /// Scans `F(x, ·)` at `samples` uniform points of `[y_lo, y_hi]` and
    /// returns every zero found, each sign change refined by bisection.
    pub fn scan_zeros(&self, x: &[f64], samples: usize) -> Result<Vec<f64>> {
        self.require_inside(x)?;
        let samples = samples.max(2);
        let (lo, hi) = (self.solution_box.y_lo, self.solution_box.y_hi);
        let ys: Vec<f64> = Grid::uniform(&[lo], &[hi], samples).map(|p| p[0]).collect();
        let values = ys
            .iter()
            .map(|&y| self.oriented(x, y))
            .collect::<Result<Vec<_>>>()?;
        let mut zeros = Vec::new();
        for i in 0..ys.len() {
            if values[i] == 0.0 {
                zeros.push(ys[i]);
            } else if i + 1 < ys.len() && values[i + 1] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0) {
                zeros.push(self.refine(x, ys[i], ys[i + 1], values[i] < 0.0)?);
            }
        }
        Ok(zeros)
    }

    fn refine(&self, x: &[f64], mut a: f64, mut b: f64, rising: bool) -> Result<f64> {
        for _ in 0..self.max_iter {
            let mid = 0.5 * (a + b);
            if b - a <= self.tol_root || mid <= a || mid >= b {
                return Ok(mid);
            }
            let v = self.oriented(x, mid)?;
            if v == 0.0 {
                return Ok(mid);
            }
            if (v < 0.0) == rising {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }
}
