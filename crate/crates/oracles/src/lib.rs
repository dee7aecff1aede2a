//! Reference routines for tests. Nothing here depends on the solver crate:
//! functions are plain closures and linear algebra is done from scratch.

pub mod corpus;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot vanishes.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &r)| {
            let mut row = row.clone();
            row.push(r);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col] == 0.0 {
            return None;
        }
        m.swap(col, pivot);
        let pivot_row = m[col].clone();
        for row in m.iter_mut().skip(col + 1) {
            let factor = row[col] / pivot_row[col];
            for (v, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *v -= factor * p;
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (m[row][n] - tail) / m[row][row];
    }
    Some(x)
}

/// Central-difference Jacobian of `f` at `p` with step `h`, as rows.
pub fn central_jacobian<F>(f: F, p: &[f64], h: f64) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut cols = Vec::with_capacity(p.len());
    for k in 0..p.len() {
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        plus[k] += h;
        minus[k] -= h;
        let (fp, fm) = (f(&plus), f(&minus));
        cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    let rows = cols.first().map_or(0, Vec::len);
    (0..rows).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton iteration for `f(y) = 0` from `y0`, with a
/// central-difference Jacobian. Returns the iterate once `max|f| ≤ tol`.
pub fn newton<F>(f: F, y0: &[f64], tol: f64, max_iter: usize) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut y = y0.to_vec();
    let mut r = f(&y);
    for _ in 0..max_iter {
        let norm = max_abs(&r);
        if norm <= tol {
            return Some(y);
        }
        let j = central_jacobian(&f, &y, 1e-7);
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = gauss_solve(&j, &neg)?;
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = y.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let rt = f(&trial);
            if rt.iter().all(|v| v.is_finite()) && max_abs(&rt) < norm {
                y = trial;
                r = rt;
                break;
            }
            t *= 0.5;
            if t < 1e-10 {
                return None;
            }
        }
    }
    (max_abs(&r) <= tol).then_some(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_solves_small_system() {
        let a = vec![vec![0.0, 2.0], vec![3.0, 1.0]];
        let x = gauss_solve(&a, &[4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        assert!(gauss_solve(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 2.0]).is_none());
    }

    #[test]
    fn newton_finds_sqrt_two() {
        let y = newton(|y: &[f64]| vec![y[0] * y[0] - 2.0], &[1.0], 1e-14, 50).unwrap();
        assert!((y[0] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn central_differences_of_a_product() {
        let j = central_jacobian(|p: &[f64]| vec![p[0] * p[1], p[0]], &[2.0, 3.0], 1e-6);
        assert!((j[0][0] - 3.0).abs() < 1e-8 && (j[0][1] - 2.0).abs() < 1e-8);
        assert!((j[1][0] - 1.0).abs() < 1e-8 && j[1][1].abs() < 1e-8);
    }
}
