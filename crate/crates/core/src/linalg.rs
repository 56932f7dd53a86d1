//! Dense complex LU with partial pivoting.
//!
//! This is the crate's second linear-algebra route, deliberately independent of
//! the Cholesky kernels in [`crate::hermitian`]: least-squares distances and the
//! test oracles (determinants, explicit inverses) go through here so that the
//! two paths can be checked against each other.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// LU factorization with partial pivoting of a dense square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    /// Packed L\U factors, row-major.
    lu: Vec<Complex64>,
    /// Row permutation applied to the input.
    perm: Vec<usize>,
    /// Sign of the permutation, +1 or -1.
    perm_sign: f64,
}

impl Lu {
    /// Factor a dense matrix given in row-major order, `n x n`.
    pub fn factor(rows: &[Vec<Complex64>]) -> Result<Lu> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
        }
        let mut lu: Vec<Complex64> = rows.iter().flatten().copied().collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut perm_sign = 1.0;
        let scale: f64 = lu.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for col in 0..n {
            let (mut best, mut best_abs) = (col, lu[col * n + col].norm());
            for row in col + 1..n {
                let a = lu[row * n + col].norm();
                if a > best_abs {
                    best = row;
                    best_abs = a;
                }
            }
            if best_abs <= scale * 1e-300 || best_abs == 0.0 {
                return Err(Error::SingularSystem);
            }
            if best != col {
                for k in 0..n {
                    lu.swap(col * n + k, best * n + k);
                }
                perm.swap(col, best);
                perm_sign = -perm_sign;
            }
            let pivot = lu[col * n + col];
            for row in col + 1..n {
                let factor = lu[row * n + col] / pivot;
                lu[row * n + col] = factor;
                for k in col + 1..n {
                    let sub = factor * lu[col * n + k];
                    lu[row * n + k] -= sub;
                }
            }
        }
        Ok(Lu { n, lu, perm, perm_sign })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Solve `A x = b` for one right-hand side.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let sub = self.lu[i * n + k] * x[k];
                x[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let sub = self.lu[i * n + k] * x[k];
                x[i] -= sub;
            }
            x[i] /= self.lu[i * n + i];
        }
        Ok(x)
    }

    /// Determinant of the factored matrix.
    pub fn det(&self) -> Complex64 {
        let mut d = Complex64::new(self.perm_sign, 0.0);
        for i in 0..self.n {
            d *= self.lu[i * self.n + i];
        }
        d
    }

    /// Explicit inverse, row-major. Quadratic-form oracles use this.
    pub fn inverse(&self) -> Result<Vec<Vec<Complex64>>> {
        let n = self.n;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Complex64::ZERO; n];
            e[j] = Complex64::ONE;
            cols.push(self.solve(&e)?);
        }
        let mut out = vec![vec![Complex64::ZERO; n]; n];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                out[i][j] = col[i];
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_solve() {
        let rows = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ];
        let lu = Lu::factor(&rows).unwrap();
        let x = lu.solve(&[c(3.0, 1.0), c(-2.0, 0.5)]).unwrap();
        assert_eq!(x, vec![c(3.0, 1.0), c(-2.0, 0.5)]);
        assert_eq!(lu.det(), c(1.0, 0.0));
    }

    #[test]
    fn det_of_2x2_complex() {
        // det [[1, i], [-i, 2]] = 2 - (i)(-i) = 2 - 1 = 1
        let rows = vec![
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ];
        let lu = Lu::factor(&rows).unwrap();
        let d = lu.det();
        assert!((d - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn solve_residual() {
        let rows = vec![
            vec![c(4.0, 0.0), c(1.0, 1.0), c(0.0, -0.5)],
            vec![c(1.0, -1.0), c(3.0, 0.0), c(0.5, 0.0)],
            vec![c(0.0, 0.5), c(0.5, 0.0), c(2.0, 0.0)],
        ];
        let lu = Lu::factor(&rows).unwrap();
        let b = [c(1.0, 2.0), c(-0.5, 0.25), c(0.0, 1.0)];
        let x = lu.solve(&b).unwrap();
        for i in 0..3 {
            let mut r = -b[i];
            for k in 0..3 {
                r += rows[i][k] * x[k];
            }
            assert!(r.norm() < 1e-13, "row {i} residual {}", r.norm());
        }
    }

    #[test]
    fn singular_is_reported() {
        let rows = vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
        ];
        assert_eq!(Lu::factor(&rows).unwrap_err(), Error::SingularSystem);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let rows = vec![
            vec![c(2.0, 0.0), c(0.3, 0.7), c(-0.1, 0.0)],
            vec![c(0.3, -0.7), c(1.5, 0.0), c(0.2, 0.1)],
            vec![c(-0.1, 0.0), c(0.2, -0.1), c(1.0, 0.0)],
        ];
        let inv = Lu::factor(&rows).unwrap().inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Complex64::ZERO;
                for k in 0..3 {
                    s += rows[i][k] * inv[k][j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s - c(want, 0.0)).norm() < 1e-13);
            }
        }
    }
}
