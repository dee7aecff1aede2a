//! Local inverses of square maps `F: ℝⁿ → ℝⁿ`.
//!
//! `G = F⁻¹` near `q = F(p)` is the implicit function of
//! `Φ(y; x) = F(x) − y` with `y` independent and `x` dependent, so the
//! system solver applies unchanged with seed `(q; p)`.

use std::sync::Arc;

use crate::dini::{SystemOptions, SystemSolution};
use crate::error::{Error, Result};
use crate::expr::{BinOp, Expr, ExprFunction};
use crate::linalg::Matrix;
use crate::point::SplitPoint;

#[derive(Debug)]
pub struct LocalInverse {
    f: ExprFunction,
    p: Vec<f64>,
    q: Vec<f64>,
    phi: ExprFunction,
    sys: SystemSolution,
}

/// Picks names for the new `y` variables that do not clash with `taken`.
fn fresh_names(n: usize, taken: &[String]) -> Vec<String> {
    let mut prefix = String::from("y");
    loop {
        let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        if names.iter().all(|c| !taken.contains(c)) {
            return names;
        }
        prefix.insert(0, '_');
    }
}

/// `Φ(y; x) = F(x) − y` as an expression over `(y₁…yₙ; x₁…xₙ)`.
pub fn displacement_map(f: &ExprFunction) -> Result<ExprFunction> {
    let n = f.num_vars();
    let shift: Vec<Expr> = (0..n).map(|k| Expr::Var(n + k)).collect();
    let components = f
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| Expr::binary(BinOp::Sub, c.substitute(&shift), Expr::Var(i)))
        .collect();
    let mut names = fresh_names(n, f.variables());
    names.extend(f.variables().iter().cloned());
    ExprFunction::from_trees(components, &names)
}

pub fn build_inverse(f: &ExprFunction, p: &[f64], opts: &SystemOptions) -> Result<LocalInverse> {
    if f.num_components() != f.num_vars() {
        return Err(Error::NotSquare {
            rows: f.num_components(),
            cols: f.num_vars(),
        });
    }
    let jf = f.jacobian(p)?;
    jf.inverse()?;
    let q = f.eval(p)?;
    let phi = displacement_map(f)?;
    let sys = SystemSolution::build(
        Arc::new(phi.clone()),
        SplitPoint::new(q.clone(), p.to_vec()),
        opts,
    )?;
    Ok(LocalInverse {
        f: f.clone(),
        p: p.to_vec(),
        q,
        phi,
        sys,
    })
}

impl LocalInverse {
    pub fn function(&self) -> &ExprFunction {
        &self.f
    }

    /// The seed `p`.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// `q = F(p)`.
    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// `Φ(y; x) = F(x) − y`.
    pub fn displacement(&self) -> &ExprFunction {
        &self.phi
    }

    pub fn system(&self) -> &SystemSolution {
        &self.sys
    }

    /// Box of validated `y` values, as `(lo, hi)`.
    pub fn y_box(&self) -> (Vec<f64>, Vec<f64>) {
        self.sys.independent_box()
    }

    /// `G(y)`, the local preimage of `y`.
    pub fn invert_at(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.sys.solve_at(y)
    }

    /// `JG(y) = JF(G(y))⁻¹`.
    pub fn inverse_jacobian_at(&self, y: &[f64]) -> Result<Matrix> {
        let x = self.invert_at(y)?;
        self.f.jacobian(&x)?.inverse()
    }

    /// `JG(y)` from the implicit system's own formula `−[∂Φ/∂x]⁻¹ ∂Φ/∂y`.
    pub fn inverse_jacobian_implicit_at(&self, y: &[f64]) -> Result<Matrix> {
        self.sys.jacobian_at(y)
    }

    /// `F(G(y)) − y`.
    pub fn round_trip_residual(&self, y: &[f64]) -> Result<Vec<f64>> {
        let x = self.invert_at(y)?;
        let fx = self.f.eval(&x)?;
        Ok(fx.iter().zip(y).map(|(a, b)| a - b).collect())
    }
}
