//! Parsed vector-valued functions of named variables.
//!
//! An [`ExprFunction`] holds one expression tree per output component and a
//! declared, ordered list of variable names. It evaluates on `f64` and on
//! [`Dual`] numbers; every partial derivative is one forward-mode pass with
//! the infinitesimal seeded on a single variable.

mod ast;
mod dual;
mod parser;

use std::fmt;

pub use ast::{BinOp, Expr, Func};
pub use dual::{Dual, Scalar};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::point::SplitPoint;

#[derive(Debug, Clone, PartialEq)]
pub struct ExprFunction {
    components: Vec<Expr>,
    variables: Vec<String>,
    sources: Vec<String>,
}

fn validate_names<S: AsRef<str>>(variables: &[S]) -> Result<Vec<String>> {
    let mut names: Vec<String> = Vec::with_capacity(variables.len());
    for v in variables {
        let v = v.as_ref();
        let valid = v
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(Error::Config(format!("`{v}` is not a valid variable name")));
        }
        if Func::from_name(v).is_some() {
            return Err(Error::Config(format!(
                "`{v}` is a function name and cannot be a variable"
            )));
        }
        if names.iter().any(|n| n == v) {
            return Err(Error::Config(format!("variable `{v}` declared twice")));
        }
        names.push(v.to_string());
    }
    Ok(names)
}

impl ExprFunction {
    /// Parses one expression per output component over the declared variables.
    pub fn parse<S: AsRef<str>, V: AsRef<str>>(texts: &[S], variables: &[V]) -> Result<Self> {
        let variables = validate_names(variables)?;
        let components = texts
            .iter()
            .map(|t| parser::parse_expr(t.as_ref(), &variables))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            components,
            sources: texts.iter().map(|t| t.as_ref().to_string()).collect(),
            variables,
        })
    }

    /// Wraps already-built trees. Sources are rendered from the trees.
    pub fn from_trees<V: AsRef<str>>(components: Vec<Expr>, variables: &[V]) -> Result<Self> {
        let variables = validate_names(variables)?;
        for (i, c) in components.iter().enumerate() {
            if let Some(k) = c.max_variable().filter(|&k| k >= variables.len()) {
                return Err(Error::DimensionMismatch(format!(
                    "component {i} references variable #{k} but only {} are declared",
                    variables.len()
                )));
            }
        }
        let sources = components
            .iter()
            .map(|c| c.display(&variables).to_string())
            .collect();
        Ok(Self {
            components,
            variables,
            sources,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// The text each component was parsed from.
    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    /// Canonical rendering of each component.
    pub fn to_strings(&self) -> Vec<String> {
        self.components
            .iter()
            .map(|c| c.display(&self.variables).to_string())
            .collect()
    }

    fn check_arity(&self, len: usize) -> Result<()> {
        if len == self.num_vars() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "function of {} variables evaluated at a point of length {len}",
                self.num_vars()
            )))
        }
    }

    fn eval_generic<T: Scalar>(&self, p: &[T]) -> Result<Vec<T>> {
        self.components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.eval(p).map_err(|fault| Error::Domain {
                    component: i,
                    subexpression: fault.node.display(&self.variables).to_string(),
                    reason: fault.reason.to_string(),
                })
            })
            .collect()
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_arity(p.len())?;
        self.eval_generic(p)
    }

    /// Evaluates on dual numbers; derivatives follow whatever seeding `p` carries.
    pub fn eval_dual(&self, p: &[Dual]) -> Result<Vec<Dual>> {
        self.check_arity(p.len())?;
        self.eval_generic(p)
    }

    /// `∂F/∂x_j(p)` for a zero-based variable index `j`.
    pub fn partial(&self, p: &[f64], j: usize) -> Result<Vec<f64>> {
        self.check_arity(p.len())?;
        if j >= self.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "variable index {j} out of range for {} variables",
                self.num_vars()
            )));
        }
        let seeded: Vec<Dual> = p
            .iter()
            .enumerate()
            .map(|(k, &v)| if k == j { Dual::variable(v) } else { Dual::constant(v) })
            .collect();
        Ok(self
            .eval_generic(&seeded)?
            .into_iter()
            .map(|d| d.derivative)
            .collect())
    }

    /// `m_out × d` Jacobian; column `j` is exactly [`ExprFunction::partial`] for `j`.
    pub fn jacobian(&self, p: &[f64]) -> Result<Matrix> {
        self.check_arity(p.len())?;
        let columns = (0..self.num_vars())
            .map(|j| self.partial(p, j))
            .collect::<Result<Vec<_>>>()?;
        if columns.is_empty() {
            return Ok(Matrix::zeros(self.num_components(), 0));
        }
        Matrix::from_columns(&columns)
    }

    /// `(∂F/∂x, ∂F/∂y)` at a split point: the first `n` and last `m` Jacobian columns.
    pub fn jacobian_split(&self, p: &SplitPoint) -> Result<(Matrix, Matrix)> {
        if self.num_components() != p.m() {
            return Err(Error::DimensionMismatch(format!(
                "{} components but {} dependent variables",
                self.num_components(),
                p.m()
            )));
        }
        let j = self.jacobian(&p.to_flat())?;
        let n = p.n();
        Ok((j.columns(0, n), j.columns(n, n + p.m())))
    }

    /// Builds `w ↦ F(offset + M·w)` over new variables named `new_variables`.
    pub fn compose_affine<V: AsRef<str>>(
        &self,
        offset: &[f64],
        m: &Matrix,
        new_variables: &[V],
    ) -> Result<ExprFunction> {
        if offset.len() != self.num_vars() || m.rows() != self.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "affine map with offset of length {} and {}x{} matrix into {} variables",
                offset.len(),
                m.rows(),
                m.cols(),
                self.num_vars()
            )));
        }
        if new_variables.len() != m.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{} new variable names for a {}-column matrix",
                new_variables.len(),
                m.cols()
            )));
        }
        let replacements: Vec<Expr> = (0..self.num_vars())
            .map(|i| affine_expr(offset[i], m.row(i)))
            .collect();
        let components = self
            .components
            .iter()
            .map(|c| c.substitute(&replacements))
            .collect();
        ExprFunction::from_trees(components, new_variables)
    }

    /// Same trees with variables renamed. Names must stay distinct.
    pub fn rename<V: AsRef<str>>(&self, variables: &[V]) -> Result<ExprFunction> {
        if variables.len() != self.num_vars() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} variables",
                variables.len(),
                self.num_vars()
            )));
        }
        ExprFunction::from_trees(self.components.clone(), variables)
    }
}

/// `c + Σ_k coeffs[k]·Var(k)`, skipping zero terms.
fn affine_expr(c: f64, coeffs: &[f64]) -> Expr {
    let mut terms = coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != 0.0)
        .map(|(k, &a)| {
            if a == 1.0 {
                Expr::Var(k)
            } else {
                Expr::binary(BinOp::Mul, Expr::Const(a), Expr::Var(k))
            }
        });
    let first = match terms.next() {
        Some(t) if c == 0.0 => t,
        Some(t) => Expr::binary(BinOp::Add, Expr::Const(c), t),
        None => return Expr::Const(c),
    };
    terms.fold(first, |acc, t| Expr::binary(BinOp::Add, acc, t))
}

impl fmt::Display for ExprFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) ↦ [", self.variables.join(", "))?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}", c.display(&self.variables))?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(texts: &[&str], vars: &[&str]) -> ExprFunction {
        ExprFunction::parse(texts, vars).unwrap()
    }

    #[test]
    fn parse_and_eval_examples() {
        let circle = f(&["x^2 + y^2 - 1"], &["x", "y"]);
        assert_eq!(circle.eval(&[0.0, 1.0]).unwrap(), vec![0.0]);
        let r = circle.eval(&[0.6, 0.8]).unwrap()[0];
        assert!(r.abs() < 1e-15, "{r}");
        assert!(matches!(
            ExprFunction::parse(&["x +"], &["x"]),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            ExprFunction::parse(&["x*z"], &["x", "y"]),
            Err(Error::UnknownIdentifier { ref name, .. }) if name == "z"
        ));
        assert_eq!(f(&["x", "y"], &["x", "y"]).eval(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn domain_errors_name_the_subexpression() {
        let g = f(&["x", "1 + ln(x)"], &["x"]);
        match g.eval(&[-1.0]) {
            Err(Error::Domain {
                component,
                subexpression,
                ..
            }) => {
                assert_eq!(component, 1);
                assert_eq!(subexpression, "ln(x)");
            }
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(f(&["sqrt(x)"], &["x"]).eval(&[-0.5]).is_err());
        assert!(f(&["1/x"], &["x"]).eval(&[0.0]).is_err());
        assert!(f(&["x^0.5"], &["x"]).eval(&[-4.0]).is_err());
        assert_eq!(f(&["x^3"], &["x"]).eval(&[-2.0]).unwrap(), vec![-8.0]);
        assert!(f(&["x^-1"], &["x"]).eval(&[0.0]).is_err());
    }

    #[test]
    fn arity_is_enforced() {
        let g = f(&["x"], &["x", "y"]);
        assert!(matches!(g.eval(&[1.0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn partial_examples() {
        let circle = f(&["x^2 + y^2 - 1"], &["x", "y"]);
        let d = circle.partial(&[0.6, 0.8], 1).unwrap();
        assert!((d[0] - 1.6).abs() < 1e-15);
        assert_eq!(f(&["x"], &["x"]).partial(&[7.3], 0).unwrap(), vec![1.0]);
        assert_eq!(f(&["sin(x)"], &["x"]).partial(&[0.0], 0).unwrap(), vec![1.0]);
        assert_eq!(f(&["abs(x)"], &["x"]).partial(&[0.0], 0).unwrap(), vec![0.0]);
    }

    #[test]
    fn elementary_function_derivatives() {
        let g = f(&["exp(x)", "ln(x)", "sqrt(x)", "cos(x)", "x^2.5", "2^x"], &["x"]);
        let x: f64 = 1.7;
        let d = g.partial(&[x], 0).unwrap();
        let expected = [
            x.exp(),
            1.0 / x,
            0.5 / x.sqrt(),
            -x.sin(),
            2.5 * x.powf(1.5),
            2f64.powf(x) * 2f64.ln(),
        ];
        for (a, b) in d.iter().zip(expected) {
            assert!((a - b).abs() < 1e-13 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn jacobian_examples() {
        let lin = f(&["x + y", "x - y"], &["x", "y"]);
        let j = lin.jacobian(&[0.3, -9.0]).unwrap();
        assert_eq!(j.to_rows(), vec![vec![1.0, 1.0], vec![1.0, -1.0]]);
        let circle = f(&["x^2 + y^2 - 1"], &["x", "y"]);
        let j = circle.jacobian(&[0.6, 0.8]).unwrap();
        assert!((j[(0, 0)] - 1.2).abs() < 1e-15 && (j[(0, 1)] - 1.6).abs() < 1e-15);
        let id = f(&["a", "b", "c"], &["a", "b", "c"]);
        assert_eq!(id.jacobian(&[1.0, 2.0, 3.0]).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn jacobian_split_examples() {
        let g = f(&["x + 2*y"], &["x", "y"]);
        let (fx, fy) = g.jacobian_split(&SplitPoint::new(vec![0.1], vec![0.2])).unwrap();
        assert_eq!((fx.to_rows(), fy.to_rows()), (vec![vec![1.0]], vec![vec![2.0]]));

        let pair = f(
            &["y1^2 + y2 - x - 1", "y1 + y2^2 - x - 1"],
            &["x", "y1", "y2"],
        );
        let (fx, fy) = pair
            .jacobian_split(&SplitPoint::new(vec![1.0], vec![1.0, 1.0]))
            .unwrap();
        assert_eq!(fx.to_rows(), vec![vec![-1.0], vec![-1.0]]);
        assert_eq!(fy.to_rows(), vec![vec![2.0, 1.0], vec![1.0, 2.0]]);

        let two = f(&["a", "b"], &["x", "a", "b", "c"]);
        assert!(matches!(
            two.jacobian_split(&SplitPoint::new(vec![0.0], vec![0.0; 3])),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn print_parse_is_stable() {
        let texts = [
            "-x^2 - (y - 1) - -x",
            "x^-2 * (x + y) / (x * y)",
            "(-x)^3 + 2^x^y",
            "sin(cos(x)) - exp(-y) + abs(x - y)",
            "1.5e-20 * x + 1e300 - 0.1",
            "x - (y + 1) / (2 / x)",
        ];
        let vars = ["x", "y"];
        for t in texts {
            let once = f(&[t], &vars);
            let printed = once.to_strings();
            let twice = f(&[printed[0].as_str()], &vars);
            assert_eq!(once.components(), twice.components(), "{t} -> {}", printed[0]);
        }
    }

    #[test]
    fn compose_affine_substitutes() {
        let g = f(&["x1^2 + x2"], &["x1", "x2"]);
        let m = Matrix::from_rows(&[[2.0], [0.0]]).unwrap();
        let h = g.compose_affine(&[0.0, 1.0], &m, &["t"]).unwrap();
        assert_eq!(h.to_strings(), vec!["(2 * t)^2 + 1"]);
        assert_eq!(h.eval(&[1.5]).unwrap(), vec![10.0]);
        assert_eq!(h.partial(&[1.5], 0).unwrap(), vec![12.0]);
    }

    #[test]
    fn variable_names_are_validated() {
        assert!(ExprFunction::parse(&["x"], &["x", "x"]).is_err());
        assert!(ExprFunction::parse(&["1"], &["sin"]).is_err());
        assert!(ExprFunction::parse(&["1"], &["2a"]).is_err());
    }
}
