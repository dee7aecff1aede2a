use std::io::Write;

use dini_core::grid::Grid;
use dini_core::linalg;
use dini_core::verify::{self, check_chain_rule, check_operator_bound, injectivity_radius, mvt_witness};
use dini_core::{build_inverse, build_system, Error, LocalInverse, SolutionBox, SplitPoint, SystemOptions, SystemSolution};
use rayon::prelude::*;
use serde::Serialize;

use crate::output::{error_kind, write_csv, write_json, BoxInfo, Diagnostics, Row};
use crate::spec::{ProblemSpec, SpecError};
use crate::{EvalArgs, Format, ImplicitArgs, Lemma, VerifyArgs, EXIT_FAILURE, EXIT_OK};

type CmdResult = Result<i32, SpecError>;

fn load(args: &EvalArgs) -> Result<ProblemSpec, SpecError> {
    let mut spec = ProblemSpec::load(&args.spec)?;
    let o = &mut spec.options;
    o.tol_root = args.tol_root.or(o.tol_root);
    o.tol_sys = args.tol_sys.or(o.tol_sys);
    o.random_seed = args.seed.or(o.random_seed);
    o.box_halfwidth = args.box_halfwidth.or(o.box_halfwidth);
    Ok(spec)
}

fn parse_point(text: &str, dim: usize) -> Result<Vec<f64>, SpecError> {
    let values = text
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| SpecError(format!("invalid number `{v}` in query `{text}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != dim {
        return Err(SpecError(format!(
            "query `{text}` has {} coordinates, expected {dim}",
            values.len()
        )));
    }
    Ok(values)
}

fn parse_axis(text: &str) -> Result<(f64, f64, usize), SpecError> {
    let bad = || SpecError(format!("invalid grid axis `{text}`, expected lo:hi:steps"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo = parts[0].trim().parse().map_err(|_| bad())?;
    let hi = parts[1].trim().parse().map_err(|_| bad())?;
    let steps = parts[2].trim().parse().map_err(|_| bad())?;
    if steps == 0 {
        return Err(bad());
    }
    Ok((lo, hi, steps))
}

/// Explicit queries first, then grid points; the seed alone when neither is given.
fn query_points(args: &EvalArgs, dim: usize, default: &[f64]) -> Result<Vec<Vec<f64>>, SpecError> {
    let mut points = args
        .queries
        .iter()
        .map(|q| parse_point(q, dim))
        .collect::<Result<Vec<_>, _>>()?;
    if !args.grids.is_empty() {
        if args.grids.len() != dim {
            return Err(SpecError(format!(
                "{} grid axes given for {dim} coordinates",
                args.grids.len()
            )));
        }
        let axes = args.grids.iter().map(|g| parse_axis(g)).collect::<Result<Vec<_>, _>>()?;
        let lo: Vec<f64> = axes.iter().map(|a| a.0).collect();
        let hi: Vec<f64> = axes.iter().map(|a| a.1).collect();
        let steps: Vec<usize> = axes.iter().map(|a| a.2).collect();
        points.extend(Grid::new(&lo, &hi, &steps));
    }
    if points.is_empty() {
        points.push(default.to_vec());
    }
    Ok(points)
}

fn strictly_inside(x: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| l < v && v < h)
}

fn failure(query: &[f64], bx: BoxInfo, e: &Error) -> Row {
    Row {
        query: query.to_vec(),
        value: None,
        jacobian: None,
        residual: None,
        bx,
        diagnostics: Diagnostics {
            status: "error",
            error_kind: Some(error_kind(e)),
            error: Some(e.to_string()),
            ..Diagnostics::default()
        },
    }
}

fn emit(doc: &impl Serialize, rows: &[Row], n: usize, m: usize, format: Format, out: &mut dyn Write) -> CmdResult {
    match format {
        Format::Json => write_json(doc, out)?,
        Format::Csv => write_csv(rows, n, m, out)?,
    }
    Ok(if rows.iter().any(Row::failed) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    })
}

#[derive(Serialize)]
struct EvalDocument<'a> {
    command: &'static str,
    functions: &'a [String],
    variables: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    displacement: Option<Vec<String>>,
    n: usize,
    m: usize,
    seed: &'a [f64],
    options: &'a SystemOptions,
    levels: Vec<SolutionBox>,
    failures: usize,
    rows: &'a [Row],
}

pub fn implicit(args: &ImplicitArgs, out: &mut dyn Write) -> CmdResult {
    let spec = load(&args.eval)?;
    let f = spec.function()?;
    let n = spec
        .split_n
        .ok_or_else(|| SpecError("implicit needs split_n".into()))?;
    let seed = spec.seed()?;
    if n >= seed.len() {
        return Err(SpecError(format!(
            "split_n = {n} leaves no unknowns among {} variables",
            seed.len()
        )));
    }
    let opts = spec.system_options();
    let sys = build_system(&f, SplitPoint::from_flat(seed, n)?, &opts)?;
    let m = sys.m();
    let rng_seed = spec.options.random_seed.unwrap_or(0);
    let points = query_points(&args.eval, n, &seed[..n])?;
    let (x_lo, x_hi) = sys.independent_box();
    let (y_lo, y_hi) = sys.dependent_box();

    let rows: Vec<Row> = points
        .par_iter()
        .map(|x| {
            let bx = BoxInfo {
                independent_lo: x_lo.clone(),
                independent_hi: x_hi.clone(),
                dependent_lo: y_lo.clone(),
                dependent_hi: y_hi.clone(),
                inside: strictly_inside(x, &x_lo, &x_hi),
            };
            implicit_row(&sys, x, bx, args.uniqueness, rng_seed)
        })
        .collect();

    let doc = EvalDocument {
        command: "implicit",
        functions: &spec.functions,
        variables: &spec.variables,
        displacement: None,
        n,
        m,
        seed,
        options: &opts,
        levels: sys.boxes(),
        failures: rows.iter().filter(|r| r.failed()).count(),
        rows: &rows,
    };
    emit(&doc, &rows, n, m, args.eval.out, out)
}

fn implicit_row(sys: &SystemSolution, x: &[f64], bx: BoxInfo, uniqueness: Option<usize>, rng_seed: u64) -> Row {
    let evaluated = (|| -> dini_core::Result<Row> {
        let y = sys.solve_at(x)?;
        let j = sys.jacobian_at(x)?;
        let residual = linalg::max_abs(&sys.residual_at(x, &y)?);
        let uniqueness = match uniqueness {
            Some(samples) => Some(sys.verify_uniqueness(x, samples, rng_seed)?),
            None => None,
        };
        Ok(Row {
            query: x.to_vec(),
            value: Some(y),
            jacobian: Some(j.to_rows()),
            residual: Some(residual),
            bx: bx.clone(),
            diagnostics: Diagnostics {
                status: "ok",
                uniqueness,
                ..Diagnostics::default()
            },
        })
    })();
    evaluated.unwrap_or_else(|e| failure(x, bx, &e))
}

pub fn invert(args: &EvalArgs, out: &mut dyn Write) -> CmdResult {
    let spec = load(args)?;
    let f = spec.function()?;
    let p = spec.seed()?;
    let opts = spec.system_options();
    let inv = build_inverse(&f, p, &opts)?;
    let n = p.len();
    let points = query_points(args, n, inv.q())?;
    let (y_lo, y_hi) = inv.y_box();
    let (x_lo, x_hi) = inv.system().dependent_box();

    let rows: Vec<Row> = points
        .par_iter()
        .map(|y| {
            let bx = BoxInfo {
                independent_lo: y_lo.clone(),
                independent_hi: y_hi.clone(),
                dependent_lo: x_lo.clone(),
                dependent_hi: x_hi.clone(),
                inside: strictly_inside(y, &y_lo, &y_hi),
            };
            invert_row(&inv, y, bx)
        })
        .collect();

    let doc = EvalDocument {
        command: "invert",
        functions: &spec.functions,
        variables: &spec.variables,
        displacement: Some(inv.displacement().to_strings()),
        n,
        m: n,
        seed: p,
        options: &opts,
        levels: inv.system().boxes(),
        failures: rows.iter().filter(|r| r.failed()).count(),
        rows: &rows,
    };
    emit(&doc, &rows, n, n, args.out, out)
}

fn invert_row(inv: &LocalInverse, y: &[f64], bx: BoxInfo) -> Row {
    let evaluated = (|| -> dini_core::Result<Row> {
        let x = inv.invert_at(y)?;
        let jg = inv.inverse_jacobian_at(y)?;
        let gap = jg.max_abs_diff(&inv.inverse_jacobian_implicit_at(y)?)?;
        let residual = linalg::max_abs(&inv.round_trip_residual(y)?);
        Ok(Row {
            query: y.to_vec(),
            value: Some(x),
            jacobian: Some(jg.to_rows()),
            residual: Some(residual),
            bx: bx.clone(),
            diagnostics: Diagnostics {
                status: "ok",
                jacobian_paths_gap: Some(gap),
                ..Diagnostics::default()
            },
        })
    })();
    evaluated.unwrap_or_else(|e| failure(y, bx, &e))
}

#[derive(Serialize)]
struct VerifyDocument<T: Serialize> {
    command: &'static str,
    lemma: &'static str,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_kind: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn verdict<T: Serialize>(lemma: &'static str, passed: bool, report: T, out: &mut dyn Write) -> CmdResult {
    let doc = VerifyDocument {
        command: "verify",
        lemma,
        passed,
        report: Some(report),
        error_kind: None,
        error: None,
    };
    write_json(&doc, out)?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILURE })
}

/// A check that ran but could not produce a passing result.
fn not_passing(lemma: &'static str, e: &Error, out: &mut dyn Write) -> CmdResult {
    let doc = VerifyDocument::<()> {
        command: "verify",
        lemma,
        passed: false,
        report: None,
        error_kind: Some(error_kind(e)),
        error: Some(e.to_string()),
    };
    write_json(&doc, out)?;
    Ok(EXIT_FAILURE)
}

pub fn verify(args: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let mut spec = ProblemSpec::load(&args.spec)?;
    spec.options.random_seed = args.seed.or(spec.options.random_seed);
    spec.options.trials = args.trials.or(spec.options.trials);
    let rng_seed = spec.options.random_seed.unwrap_or(0);
    match args.lemma {
        Lemma::Lemma1 => {
            let m = spec.matrix()?;
            let report = check_operator_bound(&m, spec.options.trials.unwrap_or(1000), rng_seed);
            verdict("lemma1", report.passed, report, out)
        }
        Lemma::Lemma2 => {
            let f = spec.function()?;
            let m = spec.matrix()?;
            let y = spec.offset.clone().unwrap_or_else(|| vec![0.0; f.num_vars()]);
            let points = match &spec.points {
                Some(p) => p.clone(),
                None => verify::sample_cube(m.cols(), spec.options.trials.unwrap_or(100), rng_seed),
            };
            let report = check_chain_rule(&f, &m, &y, &points)?;
            verdict("lemma2", report.passed, report, out)
        }
        Lemma::Lemma3 => {
            let f = spec.function()?;
            let a = spec.a.as_deref().ok_or_else(|| SpecError("lemma3 needs `a`".into()))?;
            let b = spec.b.as_deref().ok_or_else(|| SpecError("lemma3 needs `b`".into()))?;
            match mvt_witness(&f, a, b, spec.options.mvt_grid.unwrap_or(1024)) {
                Ok(report) => verdict("lemma3", report.found, report, out),
                Err(e @ Error::NoSignChange { .. }) => not_passing("lemma3", &e, out),
                Err(e) => Err(e.into()),
            }
        }
        Lemma::Lemma4 => {
            let f = spec.function()?;
            let p = spec.seed()?;
            match injectivity_radius(&f, p, &spec.injectivity_options()) {
                Ok(report) => verdict("lemma4", true, report, out),
                Err(e @ Error::RadiusUnderflow { .. }) => not_passing("lemma4", &e, out),
                Err(e) => Err(e.into()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_points_and_axes() {
        assert_eq!(parse_point("0.5, -1", 2).unwrap(), vec![0.5, -1.0]);
        assert!(parse_point("0.5", 2).is_err());
        assert!(parse_point("a,b", 2).is_err());
        assert_eq!(parse_axis("-1:1:5").unwrap(), (-1.0, 1.0, 5));
        assert!(parse_axis("0:1").is_err());
        assert!(parse_axis("0:1:0").is_err());
    }
}
