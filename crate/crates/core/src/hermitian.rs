//! Dense Hermitian kernels: sections, incremental Cholesky factorization,
//! triangular solves, determinant ratios and the smallest eigenvalue.
//!
//! Everything runs in double precision. Moment matrices of measures far from
//! the unit circle are severely ill-conditioned; when pivots fall below the
//! tolerance the factorization reports [`Error::NotPositiveDefinite`] with the
//! failing order instead of regularizing — the breakdown order is diagnostic
//! information in its own right.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivot acceptance threshold, relative to the largest diagonal entry seen.
pub const DEFAULT_PIVOT_TOL_REL: f64 = 1e-13;

/// Dense (n+1)×(n+1) truncation of an infinite Hermitian matrix.
///
/// The mirror symmetry data[j][k] = conj(data[k][j]) holds exactly: sections
/// are always built from a lower triangle and mirrored.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSection {
    order: usize,
    data: Vec<Complex64>,
}

impl HermitianSection {
    /// Build from a generator of the lower triangle (j ≥ k). The upper
    /// triangle is mirrored and the diagonal forced real.
    pub fn from_lower<F>(order: usize, mut entry: F) -> Result<HermitianSection>
    where
        F: FnMut(usize, usize) -> Result<Complex64>,
    {
        let size = order + 1;
        let mut data = vec![Complex64::ZERO; size * size];
        for j in 0..size {
            for k in 0..=j {
                let v = entry(j, k)?;
                if j == k {
                    data[j * size + j] = Complex64::new(v.re, 0.0);
                } else {
                    data[j * size + k] = v;
                    data[k * size + j] = v.conj();
                }
            }
        }
        Ok(HermitianSection { order, data })
    }

    /// Build from explicit rows, rejecting input whose Hermitian deviation
    /// exceeds `tol · (1 + max entry)`. Accepted input is symmetrized.
    pub fn from_rows(rows: &[Vec<Complex64>], tol: f64) -> Result<HermitianSection> {
        if rows.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        let size = rows.len();
        for r in rows {
            if r.len() != size {
                return Err(Error::DimensionMismatch { expected: size, got: r.len() });
            }
        }
        let scale = 1.0 + rows.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        let mut max_dev = 0f64;
        for j in 0..size {
            for k in 0..=j {
                max_dev = max_dev.max((rows[j][k] - rows[k][j].conj()).norm() / 2.0);
            }
        }
        if max_dev > tol * scale {
            return Err(Error::NotHermitian { max_dev });
        }
        HermitianSection::from_lower(size - 1, |j, k| Ok((rows[j][k] + rows[k][j].conj()) / 2.0))
    }

    pub fn identity(order: usize) -> HermitianSection {
        HermitianSection::from_lower(order, |j, k| {
            Ok(if j == k { Complex64::ONE } else { Complex64::ZERO })
        })
        .expect("identity generator never fails")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn size(&self) -> usize {
        self.order + 1
    }

    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        self.data[j * self.size() + k]
    }

    /// Row j restricted to columns 0..=j, as needed by `cholesky_extend`.
    pub fn lower_row(&self, j: usize) -> Vec<Complex64> {
        (0..=j).map(|k| self.at(j, k)).collect()
    }

    /// Leading (m+1)×(m+1) block.
    pub fn leading(&self, m: usize) -> HermitianSection {
        assert!(m <= self.order, "leading block order {m} exceeds section order {}", self.order);
        HermitianSection::from_lower(m, |j, k| Ok(self.at(j, k))).expect("copy never fails")
    }

    pub fn max_diag(&self) -> f64 {
        (0..self.size()).map(|j| self.at(j, j).re).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Lower-triangular Cholesky factor with strictly positive real diagonal,
/// extendable by one order at a time.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    /// Row k holds (L[k][0], …, L[k][k]); the diagonal entry is real.
    rows: Vec<Vec<Complex64>>,
    /// Lower triangle of the factored section, kept for extension and audits.
    source_rows: Vec<Vec<Complex64>>,
    max_diag_seen: f64,
    pivot_tol_rel: f64,
}

/// Factor a Hermitian section, certifying positive definiteness pivot by
/// pivot. The pivot threshold is relative to the running maximum diagonal so
/// batch factorization and one-row extension agree bitwise.
pub fn cholesky(s: &HermitianSection) -> Result<CholeskyFactor> {
    cholesky_with_tol(s, DEFAULT_PIVOT_TOL_REL)
}

pub fn cholesky_with_tol(s: &HermitianSection, pivot_tol_rel: f64) -> Result<CholeskyFactor> {
    let mut f = CholeskyFactor::new_incremental(pivot_tol_rel);
    for j in 0..=s.order() {
        f.push_row(&s.lower_row(j))?;
    }
    Ok(f)
}

/// Extend a factor by the next section row (length order+2); the existing
/// rows are reused bitwise and the cost is O(n²).
pub fn cholesky_extend(f: &CholeskyFactor, new_row: &[Complex64]) -> Result<CholeskyFactor> {
    let mut out = f.clone();
    out.push_row(new_row)?;
    Ok(out)
}

impl CholeskyFactor {
    pub(crate) fn new_incremental(pivot_tol_rel: f64) -> CholeskyFactor {
        CholeskyFactor {
            rows: Vec::new(),
            source_rows: Vec::new(),
            max_diag_seen: 0.0,
            pivot_tol_rel,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.rows.len()
    }

    /// Append row n+1 of the source section and grow the factor.
    pub(crate) fn push_row(&mut self, new_row: &[Complex64]) -> Result<()> {
        let n = self.rows.len();
        if new_row.len() != n + 1 {
            return Err(Error::DimensionMismatch { expected: n + 1, got: new_row.len() });
        }
        let diag = new_row[n].re;
        let max_diag = self.max_diag_seen.max(diag);
        let mut lrow: Vec<Complex64> = Vec::with_capacity(n + 1);
        for k in 0..n {
            let mut s = new_row[k];
            for p in 0..k {
                s -= lrow[p] * self.rows[k][p].conj();
            }
            lrow.push(s / self.rows[k][k]);
        }
        let mut d = diag;
        for l in &lrow {
            d -= l.norm_sqr();
        }
        if !d.is_finite() || d <= self.pivot_tol_rel * max_diag || d <= 0.0 {
            return Err(Error::NotPositiveDefinite { failing_order: n });
        }
        lrow.push(Complex64::new(d.sqrt(), 0.0));
        self.rows.push(lrow);
        self.source_rows.push(new_row.to_vec());
        self.max_diag_seen = max_diag;
        Ok(())
    }

    /// Truncation order n of the factored (n+1)×(n+1) section.
    pub fn order(&self) -> usize {
        debug_assert!(!self.rows.is_empty());
        self.rows.len() - 1
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        if k <= j {
            self.rows[j][k]
        } else {
            Complex64::ZERO
        }
    }

    pub fn diag(&self, k: usize) -> f64 {
        self.rows[k][k].re
    }

    /// Solve L x = b by forward substitution.
    pub fn forward_solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.rows.len() {
            return Err(Error::DimensionMismatch { expected: self.rows.len(), got: b.len() });
        }
        let mut x: Vec<Complex64> = Vec::with_capacity(b.len());
        for (i, row) in self.rows.iter().enumerate() {
            let mut s = b[i];
            for (p, xv) in x.iter().enumerate() {
                s -= row[p] * xv;
            }
            x.push(s / row[i]);
        }
        Ok(x)
    }

    /// |M_k| / |M_{k−1}| = L[k][k]², the k-th pivot; for k = 0 this is M[0][0].
    pub fn det_ratio(&self, k: usize) -> f64 {
        assert!(k < self.rows.len(), "det_ratio order {k} exceeds factor order {}", self.order());
        let l = self.rows[k][k].re;
        l * l
    }

    /// Rebuild the factored section (mirrored from the stored lower triangle).
    pub fn source_section(&self) -> HermitianSection {
        HermitianSection::from_lower(self.order(), |j, k| Ok(self.source_rows[j][k]))
            .expect("stored triangle is complete")
    }
}

/// Smallest eigenvalue of a Hermitian section, via unitary reduction to a real
/// symmetric tridiagonal matrix followed by Sturm-count bisection.
pub fn smallest_eigenvalue(s: &HermitianSection) -> Result<f64> {
    let (d, e) = tridiagonalize(s);
    smallest_tridiagonal_eigenvalue(&d, &e)
}

/// Householder reduction of a Hermitian matrix to a real symmetric tridiagonal
/// (diagonal, subdiagonal); subdiagonal phases are absorbed by a unitary
/// diagonal similarity so only magnitudes remain.
fn tridiagonalize(s: &HermitianSection) -> (Vec<f64>, Vec<f64>) {
    let m = s.size();
    let mut a: Vec<Vec<Complex64>> = (0..m)
        .map(|j| (0..m).map(|k| s.at(j, k)).collect())
        .collect();
    let mut d = vec![0.0; m];
    let mut e = vec![0.0; m.saturating_sub(1)];

    for k in 0..m.saturating_sub(1) {
        let nsub = m - k - 1;
        // column below the diagonal
        let x: Vec<Complex64> = (0..nsub).map(|i| a[k + 1 + i][k]).collect();
        let norm_x = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        d[k] = a[k][k].re;
        e[k] = norm_x;
        if norm_x == 0.0 {
            continue;
        }
        let alpha = x[0];
        let phase = if alpha == Complex64::ZERO { Complex64::ONE } else { alpha / alpha.norm() };
        let beta = -phase * norm_x;
        // Householder vector w = (x - beta e1) / ||x - beta e1||
        let mut w = x;
        w[0] -= beta;
        let wnorm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if wnorm == 0.0 {
            continue;
        }
        for c in &mut w {
            *c /= wnorm;
        }
        // two-sided rank-2 update of the trailing block B -> (I-2ww*) B (I-2ww*)
        let mut u = vec![Complex64::ZERO; nsub];
        for i in 0..nsub {
            let mut s = Complex64::ZERO;
            for j in 0..nsub {
                s += a[k + 1 + i][k + 1 + j] * w[j];
            }
            u[i] = s;
        }
        let c: f64 = (0..nsub).map(|i| (w[i].conj() * u[i]).re).sum();
        for i in 0..nsub {
            for j in 0..nsub {
                let upd = 2.0 * w[i] * u[j].conj() + 2.0 * u[i] * w[j].conj()
                    - 4.0 * c * w[i] * w[j].conj();
                a[k + 1 + i][k + 1 + j] -= upd;
            }
        }
    }
    if m >= 2 {
        d[m - 2] = a[m - 2][m - 2].re;
    }
    d[m - 1] = a[m - 1][m - 1].re;
    (d, e)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below x.
fn count_below(d: &[f64], e: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0usize;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn smallest_tridiagonal_eigenvalue(d: &[f64], e: &[f64]) -> Result<f64> {
    if d.len() == 1 {
        return Ok(d[0]);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..d.len() {
        let r = if i == 0 { e[0].abs() } else if i == d.len() - 1 { e[i - 1].abs() } else { e[i - 1].abs() + e[i].abs() };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * scale * scale);
    let tol = 4.0 * f64::EPSILON * scale;
    for _ in 0..300 {
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if count_below(d, e, mid, pivmin) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::NoConvergence { lo, hi })
}
