//! Small dense real linear algebra.
//!
//! Vectors are plain `[f64]` slices; [`Matrix`] is a row-major dense matrix.
//! Factorizations use Gaussian elimination with partial pivoting. A pivot is
//! treated as zero when its magnitude falls below [`PIVOT_EPS`] times the
//! Hilbert–Schmidt norm of the matrix being factored.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative pivot threshold used by [`Matrix::solve`] and [`Matrix::inverse`].
pub const PIVOT_EPS: f64 = 1e-12;

/// Default residual tolerance for linear solves.
pub const TOL_LINEAR: f64 = 1e-10;

#[derive(Clone, PartialEq, Serialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Config(format!("matrix entry {bad} is not finite")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Builds a matrix from its columns.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Copies the columns `start..end`.
    pub fn columns(&self, start: usize, end: usize) -> Matrix {
        let mut out = Matrix::zeros(self.rows, end - start);
        for i in 0..self.rows {
            for j in start..end {
                out[(i, j - start)] = self[(i, j)];
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Hilbert–Schmidt (Frobenius) norm: square root of the sum of squared entries.
    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Determinant by LU factorization with partial pivoting.
    ///
    /// Never fails on singular input: an exactly zero pivot column yields 0.
    pub fn det(&self) -> Result<f64> {
        self.require_square()?;
        match Lu::factor(self, 0.0) {
            Ok(lu) => Ok(lu.det()),
            Err(Error::SingularMatrix { .. }) => Ok(0.0),
            Err(e) => Err(e),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.require_square()?;
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} system with right-hand side of length {}",
                self.rows,
                self.cols,
                b.len()
            )));
        }
        let lu = Lu::factor(self, PIVOT_EPS * self.hs_norm())?;
        Ok(lu.solve(b))
    }

    /// Solves `self · X = rhs` for a matrix of right-hand sides.
    pub fn solve_matrix(&self, rhs: &Matrix) -> Result<Matrix> {
        self.require_square()?;
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} system with {}x{} right-hand side",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let lu = Lu::factor(self, PIVOT_EPS * self.hs_norm())?;
        let cols: Vec<Vec<f64>> = (0..rhs.cols).map(|j| lu.solve(&rhs.column(j))).collect();
        Matrix::from_columns(&cols).map(|m| {
            if rhs.cols == 0 {
                Matrix::zeros(self.rows, 0)
            } else {
                m
            }
        })
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve_matrix(&Matrix::identity(self.rows))
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.rows).map(|i| self.row(i))).finish()
    }
}

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `a - b`, componentwise.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + b`, componentwise.
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    /// Pivots with magnitude `<= threshold` (or exactly zero) are rejected.
    fn factor(m: &Matrix, threshold: f64) -> Result<Self> {
        let n = m.rows;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[i * n + k].abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot == 0.0 || pivot < threshold {
                return Err(Error::SingularMatrix { pivot, threshold });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / d;
                lu[i * n + k] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= factor * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm, swaps })
    }

    fn det(&self) -> f64 {
        let diag: f64 = (0..self.n).map(|i| self.lu[i * self.n + i]).product();
        if self.swaps.is_multiple_of(2) {
            diag
        } else {
            -diag
        }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn hs_norm_examples() {
        assert!((Matrix::identity(2).hs_norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Matrix::zeros(3, 4).hs_norm(), 0.0);
        assert_eq!(m(&[&[3.0, 4.0]]).hs_norm(), 5.0);
    }

    #[test]
    fn matvec_examples() {
        let v = [1.5, -2.0, 7.0];
        assert_eq!(Matrix::identity(3).matvec(&v).unwrap(), v.to_vec());
        assert_eq!(
            m(&[&[1.0, 1.0], &[1.0, -1.0]]).matvec(&[3.0, 4.0]).unwrap(),
            vec![7.0, -1.0]
        );
        assert!(matches!(
            m(&[&[1.0, 2.0, 3.0]]).matvec(&[1.0, 1.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn det_examples() {
        assert_eq!(Matrix::identity(4).det().unwrap(), 1.0);
        assert!((m(&[&[2.0, 1.0], &[1.0, 2.0]]).det().unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(m(&[&[1.0, 2.0], &[2.0, 4.0]]).det().unwrap(), 0.0);
        assert!(matches!(
            Matrix::zeros(2, 3).det(),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn det_tracks_row_swaps() {
        let p = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(p.det().unwrap(), -1.0);
    }

    #[test]
    fn solve_examples() {
        let b = [0.25, -3.0];
        assert_eq!(Matrix::identity(2).solve(&b).unwrap(), b.to_vec());
        let x = m(&[&[2.0, 1.0], &[1.0, 2.0]]).solve(&[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
        assert!(matches!(
            m(&[&[1.0, 2.0], &[2.0, 4.0]]).solve(&[1.0, 1.0]),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn singularity_threshold_is_relative() {
        // A tiny but well-conditioned matrix is not singular.
        let tiny = Matrix::identity(3).scaled(1e-20);
        assert!(tiny.inverse().is_ok());
        let nearly = m(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-14]]);
        assert!(matches!(nearly.inverse(), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Matrix::identity(3).inverse().unwrap(), Matrix::identity(3));
        assert_eq!(
            m(&[&[2.0, 0.0], &[0.0, 4.0]]).inverse().unwrap(),
            m(&[&[0.5, 0.0], &[0.0, 0.25]])
        );
        let inv = m(&[&[2.0, 1.0], &[1.0, 2.0]]).inverse().unwrap();
        let expected = m(&[&[2.0, -1.0], &[-1.0, 2.0]]).scaled(1.0 / 3.0);
        assert!(inv.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(Matrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(Matrix::new(1, 2, vec![1.0]).is_err());
    }
}
