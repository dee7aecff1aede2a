use serde::Serialize;

use crate::error::{Error, Result};

/// A point `(x, y)` of `ℝⁿ × ℝᵐ` with explicit independent/dependent blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SplitPoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y }
    }

    /// Splits a flat point after its first `n` coordinates.
    pub fn from_flat(p: &[f64], n: usize) -> Result<Self> {
        if n > p.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot split a point of length {} after {n} coordinates",
                p.len()
            )));
        }
        Ok(Self {
            x: p[..n].to_vec(),
            y: p[n..].to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn m(&self) -> usize {
        self.y.len()
    }

    /// `(x₁,…,xₙ, y₁,…,yₘ)`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n() + self.m());
        p.extend_from_slice(&self.x);
        p.extend_from_slice(&self.y);
        p
    }
}

/// Joins an independent block and a scalar dependent value.
pub(crate) fn join(x: &[f64], y: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(x.len() + 1);
    p.extend_from_slice(x);
    p.push(y);
    p
}
