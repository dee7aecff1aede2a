//! Differentiable maps the solvers operate on.
//!
//! The top level of every problem is an [`ExprFunction`], but the nested
//! levels of the system solver work on maps that contain implicitly defined
//! functions, so the solvers are written against [`SmoothMap`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr, ExprFunction};
use crate::linalg::Matrix;

pub trait SmoothMap: Send + Sync + fmt::Debug {
    fn num_inputs(&self) -> usize;

    fn num_outputs(&self) -> usize;

    fn eval(&self, p: &[f64]) -> Result<Vec<f64>>;

    fn jacobian(&self, p: &[f64]) -> Result<Matrix>;

    /// Column `j` of the Jacobian.
    fn partial(&self, p: &[f64], j: usize) -> Result<Vec<f64>> {
        Ok(self.jacobian(p)?.column(j))
    }

    /// The underlying expression, when the map is one.
    fn as_expr(&self) -> Option<&ExprFunction> {
        None
    }
}

impl SmoothMap for ExprFunction {
    fn num_inputs(&self) -> usize {
        self.num_vars()
    }

    fn num_outputs(&self) -> usize {
        self.num_components()
    }

    fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        ExprFunction::eval(self, p)
    }

    fn jacobian(&self, p: &[f64]) -> Result<Matrix> {
        ExprFunction::jacobian(self, p)
    }

    fn partial(&self, p: &[f64], j: usize) -> Result<Vec<f64>> {
        ExprFunction::partial(self, p, j)
    }

    fn as_expr(&self) -> Option<&ExprFunction> {
        Some(self)
    }
}

/// One output component of a map, with one input moved to the last slot.
///
/// Turns a component `Fᵢ` of a larger system into the scalar problem
/// `Fᵢ(x, y) = 0` in the layout the scalar solver expects (independent
/// block first, dependent variable last).
#[derive(Debug, Clone)]
pub struct ScalarSlice {
    inner: Arc<dyn SmoothMap>,
    component: usize,
    dependent: usize,
}

impl ScalarSlice {
    pub fn new(inner: Arc<dyn SmoothMap>, component: usize, dependent: usize) -> Result<Self> {
        if component >= inner.num_outputs() || dependent >= inner.num_inputs() {
            return Err(Error::DimensionMismatch(format!(
                "component {component} / input {dependent} out of range for a {}→{} map",
                inner.num_inputs(),
                inner.num_outputs()
            )));
        }
        Ok(Self {
            inner,
            component,
            dependent,
        })
    }

    fn full_point(&self, p: &[f64]) -> Vec<f64> {
        let (indep, y) = p.split_at(p.len() - 1);
        let mut full = Vec::with_capacity(p.len());
        full.extend_from_slice(&indep[..self.dependent]);
        full.push(y[0]);
        full.extend_from_slice(&indep[self.dependent..]);
        full
    }

    fn inner_index(&self, j: usize) -> usize {
        let last = self.inner.num_inputs() - 1;
        if j == last {
            self.dependent
        } else if j < self.dependent {
            j
        } else {
            j + 1
        }
    }

    fn check(&self, p: &[f64]) -> Result<()> {
        if p.len() == self.num_inputs() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "scalar slice of {} inputs evaluated at a point of length {}",
                self.num_inputs(),
                p.len()
            )))
        }
    }
}

impl SmoothMap for ScalarSlice {
    fn num_inputs(&self) -> usize {
        self.inner.num_inputs()
    }

    fn num_outputs(&self) -> usize {
        1
    }

    fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check(p)?;
        Ok(vec![self.inner.eval(&self.full_point(p))?[self.component]])
    }

    fn jacobian(&self, p: &[f64]) -> Result<Matrix> {
        self.check(p)?;
        let j = self.inner.jacobian(&self.full_point(p))?;
        let row: Vec<f64> = (0..self.num_inputs())
            .map(|k| j[(self.component, self.inner_index(k))])
            .collect();
        Matrix::new(1, row.len(), row)
    }

    fn partial(&self, p: &[f64], j: usize) -> Result<Vec<f64>> {
        self.check(p)?;
        let col = self.inner.partial(&self.full_point(p), self.inner_index(j))?;
        Ok(vec![col[self.component]])
    }
}

/// `(x; z) ↦ F(x; b + N(z − b))` for a map whose last `m` inputs are `y`.
#[derive(Debug, Clone)]
pub struct TailAffine {
    inner: Arc<dyn SmoothMap>,
    n: usize,
    base: Vec<f64>,
    matrix: Matrix,
}

impl TailAffine {
    fn inner_point(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.num_inputs() {
            return Err(Error::DimensionMismatch(format!(
                "map of {} inputs evaluated at a point of length {}",
                self.num_inputs(),
                p.len()
            )));
        }
        let (x, z) = p.split_at(self.n);
        let shifted: Vec<f64> = z.iter().zip(&self.base).map(|(z, b)| z - b).collect();
        let moved = self.matrix.matvec(&shifted)?;
        let mut full = x.to_vec();
        full.extend(self.base.iter().zip(moved).map(|(b, d)| b + d));
        Ok(full)
    }
}

impl SmoothMap for TailAffine {
    fn num_inputs(&self) -> usize {
        self.inner.num_inputs()
    }

    fn num_outputs(&self) -> usize {
        self.inner.num_outputs()
    }

    fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.inner.eval(&self.inner_point(p)?)
    }

    fn jacobian(&self, p: &[f64]) -> Result<Matrix> {
        let j = self.inner.jacobian(&self.inner_point(p)?)?;
        let d = self.inner.num_inputs();
        let tail = j.columns(self.n, d).matmul(&self.matrix)?;
        let mut out = j;
        for i in 0..out.rows() {
            for k in self.n..d {
                out[(i, k)] = tail[(i, k - self.n)];
            }
        }
        Ok(out)
    }
}

/// Substitutes `y = b + N(z − b)` into the last `m = b.len()` inputs.
///
/// Expression-backed maps get the substitution done on their trees; any
/// other map is wrapped. Rows of `N` equal to a unit vector `eⱼ` with
/// matching `bⱼ` substitute the variable directly, so an identity `N`
/// leaves the trees unchanged.
pub fn reparametrize_tail(
    map: Arc<dyn SmoothMap>,
    base: &[f64],
    matrix: &Matrix,
) -> Result<Arc<dyn SmoothMap>> {
    let m = base.len();
    if !matrix.is_square() || matrix.rows() != m || m > map.num_inputs() {
        return Err(Error::DimensionMismatch(format!(
            "cannot reparametrize {m} trailing inputs of a {}-input map with a {}x{} matrix",
            map.num_inputs(),
            matrix.rows(),
            matrix.cols()
        )));
    }
    let n = map.num_inputs() - m;
    if let Some(expr) = map.as_expr() {
        return Ok(Arc::new(reparametrize_expr(expr, n, base, matrix)?));
    }
    Ok(Arc::new(TailAffine {
        inner: map,
        n,
        base: base.to_vec(),
        matrix: matrix.clone(),
    }))
}

fn reparametrize_expr(
    f: &ExprFunction,
    n: usize,
    base: &[f64],
    matrix: &Matrix,
) -> Result<ExprFunction> {
    let mut replacements: Vec<Expr> = (0..n).map(Expr::Var).collect();
    for (j, row) in (0..base.len()).map(|j| (j, matrix.row(j))) {
        let is_unit = row
            .iter()
            .enumerate()
            .all(|(k, &a)| if k == j { a == 1.0 } else { a == 0.0 });
        if is_unit {
            replacements.push(Expr::Var(n + j));
            continue;
        }
        let terms = row.iter().enumerate().filter(|(_, a)| **a != 0.0).map(|(k, &a)| {
            let shifted = if base[k] == 0.0 {
                Expr::Var(n + k)
            } else {
                Expr::binary(BinOp::Sub, Expr::Var(n + k), Expr::Const(base[k]))
            };
            Expr::binary(BinOp::Mul, Expr::Const(a), shifted)
        });
        let sum = terms.reduce(|acc, t| Expr::binary(BinOp::Add, acc, t));
        replacements.push(match sum {
            None => Expr::Const(base[j]),
            Some(s) if base[j] == 0.0 => s,
            Some(s) => Expr::binary(BinOp::Add, Expr::Const(base[j]), s),
        });
    }
    let components = f
        .components()
        .iter()
        .map(|c| c.substitute(&replacements))
        .collect();
    ExprFunction::from_trees(components, f.variables())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_slice_moves_dependent_last() {
        let f: Arc<dyn SmoothMap> = Arc::new(
            ExprFunction::parse(&["a + 10*b + 100*c", "a*b*c"], &["a", "b", "c"]).unwrap(),
        );
        let s = ScalarSlice::new(f, 0, 1).unwrap();
        // Inputs are (a, c, b).
        assert_eq!(s.eval(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0 + 30.0 + 200.0]);
        assert_eq!(s.jacobian(&[1.0, 2.0, 3.0]).unwrap().to_rows(), vec![vec![1.0, 100.0, 10.0]]);
        assert_eq!(s.partial(&[1.0, 2.0, 3.0], 2).unwrap(), vec![10.0]);
    }

    #[test]
    fn wrapped_and_substituted_reparametrizations_agree() {
        let f = ExprFunction::parse(&["x*y1^2 + sin(y2)", "y1 - y2^3 + x"], &["x", "y1", "y2"])
            .unwrap();
        let base = [0.5, -0.25];
        let n_mat = Matrix::from_rows(&[[2.0, -1.0], [0.5, 3.0]]).unwrap();
        let tree = reparametrize_tail(Arc::new(f.clone()), &base, &n_mat).unwrap();
        assert!(tree.as_expr().is_some());
        let wrapped = TailAffine {
            inner: Arc::new(f),
            n: 1,
            base: base.to_vec(),
            matrix: n_mat,
        };
        let p = [0.3, 0.9, -0.7];
        let (a, b) = (tree.eval(&p).unwrap(), wrapped.eval(&p).unwrap());
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-14);
        }
        let diff = tree
            .jacobian(&p)
            .unwrap()
            .max_abs_diff(&wrapped.jacobian(&p).unwrap())
            .unwrap();
        assert!(diff < 1e-13, "{diff}");
    }

    #[test]
    fn identity_reparametrization_keeps_trees() {
        let f = ExprFunction::parse(&["x + y1*y2", "y2 - x"], &["x", "y1", "y2"]).unwrap();
        let g = reparametrize_tail(Arc::new(f.clone()), &[1.0, 2.0], &Matrix::identity(2)).unwrap();
        assert_eq!(g.as_expr().unwrap().components(), f.components());
    }
}
