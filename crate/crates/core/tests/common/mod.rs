#![allow(dead_code)]

use dini_core::grid::Grid;
use dini_core::{build_system, ExprFunction, ScalarOptions, SplitPoint, SystemOptions, SystemSolution};
use dini_oracles::corpus::System;

pub fn options(sys: &System) -> SystemOptions {
    let mut opts = SystemOptions::default();
    if let Some(h) = sys.half_width {
        opts.scalar = ScalarOptions {
            half_width: h,
            ..opts.scalar
        };
    }
    opts
}

pub fn parse(sys: &System) -> ExprFunction {
    ExprFunction::parse(sys.functions, sys.variables).unwrap()
}

pub fn build(sys: &System) -> (ExprFunction, SystemSolution) {
    let f = parse(sys);
    let seed = SplitPoint::new(sys.seed_x(), sys.seed_y());
    let solution = build_system(&f, seed, &options(sys)).unwrap();
    (f, solution)
}

/// At least `min_points` points strictly inside the independent box,
/// pulled in by `margin` of each half-width so finite differences stay inside.
pub fn interior_points(solution: &SystemSolution, min_points: usize, margin: f64) -> Vec<Vec<f64>> {
    let (lo, hi) = solution.independent_box();
    let n = lo.len();
    let per_axis = (1..).find(|k: &usize| k.pow(n as u32) >= min_points).unwrap();
    let shrink = |l: f64, h: f64| 0.5 * (h - l) * margin;
    let lo2: Vec<f64> = lo.iter().zip(&hi).map(|(&l, &h)| l + shrink(l, h)).collect();
    let hi2: Vec<f64> = lo.iter().zip(&hi).map(|(&l, &h)| h - shrink(l, h)).collect();
    Grid::interior(&lo2, &hi2, per_axis).collect()
}

/// Central differences of `solve_at`, as an `m × n` array of rows.
pub fn fd_jacobian(solution: &SystemSolution, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    dini_oracles::central_jacobian(|p: &[f64]| solution.solve_at(p).unwrap(), x, h)
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
