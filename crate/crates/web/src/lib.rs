//! WebAssembly bindings for the browser demo. Each export takes plain
//! numbers and expression strings and returns a JSON document; failures come
//! back as `{"error": "..."}` so the page can show them inline.

use dini_core::verify::mvt_witness;
use dini_core::{build_inverse, ExprFunction, ImplicitSolution, ScalarOptions, SplitPoint, SystemOptions};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct CurvePoint {
    x: f64,
    y: f64,
    slope: f64,
}

#[derive(Serialize)]
struct Curve {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
    shrinks: usize,
    points: Vec<CurvePoint>,
    /// Sign of `F` on a `resolution × resolution` grid over the box, rows by `y`.
    field: Vec<Vec<i8>>,
}

fn to_json<T: Serialize>(result: Result<T, String>) -> String {
    match result {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e),
    }
}

fn error_json(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

fn linspace(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let count = count.max(2);
    (0..count).map(move |i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
}

/// Traces `F(x, y) = 0` through the validated box around `(x0, y0)`.
pub fn trace_curve_doc(
    function: &str,
    x0: f64,
    y0: f64,
    half_width: f64,
    samples: usize,
    resolution: usize,
) -> Result<impl Serialize, String> {
    let f = ExprFunction::parse(&[function], &["x", "y"]).map_err(|e| e.to_string())?;
    let opts = ScalarOptions {
        half_width,
        ..ScalarOptions::default()
    };
    let sol = ImplicitSolution::from_expr(&f, SplitPoint::new(vec![x0], vec![y0]), &opts).map_err(|e| e.to_string())?;
    let bx = sol.solution_box().clone();
    let (lo, hi) = (bx.x_lo[0], bx.x_hi[0]);
    let inset = (hi - lo) * 1e-9;
    let points = linspace(lo + inset, hi - inset, samples)
        .filter_map(|x| {
            let y = sol.solve_at(&[x]).ok()?;
            let slope = sol.gradient_at(&[x]).ok()?[0];
            Some(CurvePoint { x, y, slope })
        })
        .collect();
    let field = linspace(bx.y_lo, bx.y_hi, resolution)
        .map(|y| {
            linspace(lo, hi, resolution)
                .map(|x| match f.eval(&[x, y]) {
                    Ok(v) if v[0] > 0.0 => 1,
                    Ok(v) if v[0] < 0.0 => -1,
                    _ => 0,
                })
                .collect()
        })
        .collect();
    Ok(Curve {
        x_lo: lo,
        x_hi: hi,
        y_lo: bx.y_lo,
        y_hi: bx.y_hi,
        shrinks: bx.shrinks,
        points,
        field,
    })
}

#[derive(Serialize)]
struct Warp {
    y_lo: Vec<f64>,
    y_hi: Vec<f64>,
    q: Vec<f64>,
    /// Images under the local inverse of grid lines of the `y` box; `None`
    /// marks points where inversion failed.
    lines: Vec<Vec<Option<[f64; 2]>>>,
}

/// Maps a grid over the validated `y` box of `F = (f1, f2)` back through the
/// local inverse at `(p1, p2)`.
pub fn inverse_warp_doc(
    f1: &str,
    f2: &str,
    p1: f64,
    p2: f64,
    lines: usize,
    samples: usize,
) -> Result<impl Serialize, String> {
    let f = ExprFunction::parse(&[f1, f2], &["x1", "x2"]).map_err(|e| e.to_string())?;
    let inv = build_inverse(&f, &[p1, p2], &SystemOptions::default()).map_err(|e| e.to_string())?;
    let (lo, hi) = inv.y_box();
    // Stay off the open box's faces.
    let pad: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| (h - l) * 1e-6).collect();
    let (lo_in, hi_in): (Vec<f64>, Vec<f64>) = (
        lo.iter().zip(&pad).map(|(l, p)| l + p).collect(),
        hi.iter().zip(&pad).map(|(h, p)| h - p).collect(),
    );
    let image = |y: [f64; 2]| inv.invert_at(&y).ok().map(|x| [x[0], x[1]]);
    let mut out = Vec::new();
    for axis in 0..2 {
        let other = 1 - axis;
        for fixed in linspace(lo_in[other], hi_in[other], lines) {
            let line = linspace(lo_in[axis], hi_in[axis], samples)
                .map(|t| {
                    let mut y = [0.0; 2];
                    y[axis] = t;
                    y[other] = fixed;
                    image(y)
                })
                .collect();
            out.push(line);
        }
    }
    Ok(Warp {
        y_lo: lo,
        y_hi: hi,
        q: inv.q().to_vec(),
        lines: out,
    })
}

#[derive(Serialize)]
struct Witness {
    c: f64,
    t: f64,
    residual: f64,
    secant_slope: f64,
    curve: Vec<[f64; 2]>,
}

/// Mean value witness for a function of `x` on `[a, b]`.
pub fn mvt_doc(function: &str, a: f64, b: f64, samples: usize) -> Result<impl Serialize, String> {
    let f = ExprFunction::parse(&[function], &["x"]).map_err(|e| e.to_string())?;
    let w = mvt_witness(&f, &[a], &[b], 1024).map_err(|e| e.to_string())?;
    let fa = f.eval(&[a]).map_err(|e| e.to_string())?[0];
    let fb = f.eval(&[b]).map_err(|e| e.to_string())?[0];
    let curve = linspace(a, b, samples)
        .filter_map(|x| f.eval(&[x]).ok().map(|v| [x, v[0]]))
        .collect();
    Ok(Witness {
        c: w.witness[0],
        t: w.t,
        residual: w.residual,
        secant_slope: (fb - fa) / (b - a),
        curve,
    })
}

#[wasm_bindgen]
pub fn trace_curve(function: &str, x0: f64, y0: f64, half_width: f64, samples: usize, resolution: usize) -> String {
    to_json(trace_curve_doc(function, x0, y0, half_width, samples, resolution))
}

#[wasm_bindgen]
pub fn inverse_warp(f1: &str, f2: &str, p1: f64, p2: f64, lines: usize, samples: usize) -> String {
    to_json(inverse_warp_doc(f1, f2, p1, p2, lines, samples))
}

#[wasm_bindgen]
pub fn mean_value(function: &str, a: f64, b: f64, samples: usize) -> String {
    to_json(mvt_doc(function, a, b, samples))
}
