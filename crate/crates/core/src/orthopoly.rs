//! Orthonormal polynomial coefficients and Christoffel–Darboux kernel
//! diagonals, all derived from a Cholesky factor.
//!
//! The factor is the single source of truth: coefficient rows are L⁻¹, and
//! K_n(z0,z0) is ‖x‖² for L x = (1, z0, …, z0ⁿ) — explicit inversion of the
//! section appears only in test oracles.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::CholeskyFactor;

/// Coefficient rows of the orthonormal polynomials: row i holds
/// (v_{0,i}, …, v_{i,i}) with φ_i(z) = Σ_j v_{j,i} z^j and v_{i,i} > 0.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    rows: Vec<Vec<Complex64>>,
}

/// K_n(z0,z0) with its last term, for convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub z0: Complex64,
    pub order: usize,
    /// May be `f64::INFINITY` when |z0| > 1 and the order is large; callers
    /// treat the reciprocal 0 as "no bounded evaluation at this order".
    pub value: f64,
    /// |φ_n(z0)|²
    pub phi_tail: f64,
}

/// Rows of L⁻¹, i.e. the Gram–Schmidt coefficients of the canonical basis.
pub fn orthonormal_coeffs(f: &CholeskyFactor) -> OrthonormalBasis {
    let n = f.order();
    let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![Complex64::ZERO; i + 1];
        let dii = f.entry(i, i);
        row[i] = Complex64::ONE / dii;
        for j in (0..i).rev() {
            let mut s = Complex64::ZERO;
            for (k, prev) in rows.iter().enumerate().take(i).skip(j) {
                s += f.entry(i, k) * prev[j];
            }
            row[j] = -s / dii;
        }
        rows.push(row);
    }
    OrthonormalBasis { rows }
}

impl OrthonormalBasis {
    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    /// Coefficients of φ_i in the monomial basis.
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.rows[i]
    }

    /// (φ_0(z), …, φ_n(z)) by Horner evaluation of each row.
    pub fn eval_phi(&self, z: Complex64) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Complex64::ZERO;
                for &c in row.iter().rev() {
                    acc = acc * z + c;
                }
                acc
            })
            .collect()
    }
}

/// K_n(z0,z0) = Σ_{k≤n} |φ_k(z0)|², via one forward solve against the factor.
///
/// For |z0| > 1 the power vector is rescaled by |z0|ⁿ so the substitution
/// stays in range; the final value may still round to infinity, and orders
/// with n·log|z0| > 600 are rejected outright.
pub fn kernel_diag(f: &CholeskyFactor, z0: Complex64) -> Result<KernelValue> {
    let n = f.order();
    let r = z0.norm();
    if r > 1.0 && n as f64 * r.ln() > 600.0 {
        return Err(Error::Overflow { order: n, abs_z0: r });
    }
    if r <= 1.0 {
        let mut k = Vec::with_capacity(n + 1);
        let mut p = Complex64::ONE;
        for _ in 0..=n {
            k.push(p);
            p *= z0;
        }
        let x = f.forward_solve(&k)?;
        let value: f64 = x.iter().map(|c| c.norm_sqr()).sum();
        Ok(KernelValue { z0, order: n, value, phi_tail: x[n].norm_sqr() })
    } else {
        let phase = z0 / r;
        let mut k = Vec::with_capacity(n + 1);
        let mut ph = Complex64::ONE;
        for j in 0..=n {
            k.push(ph * r.powi(j as i32 - n as i32));
            ph *= phase;
        }
        let x = f.forward_solve(&k)?;
        let sum: f64 = x.iter().map(|c| c.norm_sqr()).sum();
        let rho2 = r.powi(2 * n as i32);
        Ok(KernelValue { z0, order: n, value: rho2 * sum, phi_tail: rho2 * x[n].norm_sqr() })
    }
}

/// Monic orthogonal polynomial norms ‖Φ_k‖² = L[k][k]², k = 0..=n.
pub fn monic_norms(f: &CholeskyFactor) -> Vec<f64> {
    (0..=f.order()).map(|k| f.det_ratio(k)).collect()
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};

    use super::*;
    use crate::hermitian::{cholesky, HermitianSection};
    use crate::linalg::Lu;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hpd(order: usize, seed: u64) -> HermitianSection {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let size = order + 1;
        let b: Vec<Vec<Complex64>> = (0..size)
            .map(|_| {
                (0..size)
                    .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect()
            })
            .collect();
        HermitianSection::from_lower(order, |j, k| {
            let mut s = if j == k { c(0.05, 0.0) } else { Complex64::ZERO };
            for p in 0..size {
                s += b[j][p] * b[k][p].conj();
            }
            Ok(s)
        })
        .unwrap()
    }

    #[test]
    fn identity_basis_is_monomials() {
        let f = cholesky(&HermitianSection::identity(3)).unwrap();
        let basis = orthonormal_coeffs(&f);
        for i in 0..=3 {
            for j in 0..=i {
                let want = if i == j { Complex64::ONE } else { Complex64::ZERO };
                assert_eq!(basis.row(i)[j], want);
            }
        }
        assert_eq!(basis.eval_phi(Complex64::ZERO), vec![
            Complex64::ONE,
            Complex64::ZERO,
            Complex64::ZERO,
            Complex64::ZERO
        ]);
        let at_half = basis.eval_phi(c(0.5, 0.0));
        for (k, v) in at_half.iter().enumerate() {
            assert!((v - c(0.5f64.powi(k as i32), 0.0)).norm() < 1e-15);
        }
    }

    fn gram_residual(s: &HermitianSection, basis: &OrthonormalBasis) -> f64 {
        let n = s.order();
        let mut worst = 0f64;
        for i in 0..=n {
            for j in 0..=n {
                let mut g = Complex64::ZERO;
                for p in 0..=i {
                    for q in 0..=j {
                        g += basis.row(i)[p] * s.at(p, q) * basis.row(j)[q].conj();
                    }
                }
                let want = if i == j { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((g - want).norm());
            }
        }
        worst
    }

    #[test]
    fn gram_identity_on_random_sections() {
        for (order, seed) in [(5usize, 9u64), (12, 10), (48, 11)] {
            let s = random_hpd(order, seed);
            let basis = orthonormal_coeffs(&cholesky(&s).unwrap());
            let res = gram_residual(&s, &basis);
            assert!(res < 1e-9, "order {order}: Gram residual {res}");
        }
    }

    #[test]
    fn gram_identity_on_paper_t() {
        let s = HermitianSection::from_lower(1, |j, k| {
            Ok(c(if j == k { 1.0 } else { -0.5 }, 0.0))
        })
        .unwrap();
        let basis = orthonormal_coeffs(&cholesky(&s).unwrap());
        assert!(gram_residual(&s, &basis) < 1e-14);
        // leading coefficient positive
        assert!(basis.row(1)[1].re > 0.0);
        assert_eq!(basis.row(1)[1].im, 0.0);
    }

    #[test]
    fn eval_matches_coefficient_dot_product() {
        let s = random_hpd(6, 12);
        let basis = orthonormal_coeffs(&cholesky(&s).unwrap());
        let z = c(0.3, -0.8);
        let phi = basis.eval_phi(z);
        for i in 0..=6 {
            let mut direct = Complex64::ZERO;
            let mut p = Complex64::ONE;
            for j in 0..=i {
                direct += basis.row(i)[j] * p;
                p *= z;
            }
            assert!((phi[i] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_geometric_closed_form() {
        let f = cholesky(&HermitianSection::identity(20)).unwrap();
        for z0 in [c(0.3, 0.0), c(0.0, 0.5), c(-0.7, 0.1)] {
            let k = kernel_diag(&f, z0).unwrap();
            let q = z0.norm_sqr();
            let want = (1.0 - q.powi(21)) / (1.0 - q);
            assert!((k.value - want).abs() < 1e-12 * want, "z0 = {z0}");
            assert!((k.phi_tail - q.powi(20)).abs() < 1e-13);
        }
    }

    #[test]
    fn kernel_two_path_identity() {
        let s = random_hpd(8, 13);
        let f = cholesky(&s).unwrap();
        let basis = orthonormal_coeffs(&f);
        for z0 in [c(0.4, 0.3), c(-1.2, 0.5), c(0.0, 0.0)] {
            let k = kernel_diag(&f, z0).unwrap();
            let phi_sum: f64 = basis.eval_phi(z0).iter().map(|v| v.norm_sqr()).sum();
            assert!(
                (k.value - phi_sum).abs() <= 1e-10 * (1.0 + phi_sum),
                "z0 = {z0}: solve {} vs eval {}",
                k.value,
                phi_sum
            );
        }
    }

    #[test]
    fn kernel_at_order_zero_is_reciprocal_mass() {
        let mass = 2.5;
        let s = HermitianSection::from_lower(0, |_, _| Ok(c(mass, 0.0))).unwrap();
        let f = cholesky(&s).unwrap();
        let k = kernel_diag(&f, c(1.7, -0.4)).unwrap();
        assert!((k.value - 1.0 / mass).abs() < 1e-15);
    }

    #[test]
    fn kernel_monotone_in_order() {
        let s = random_hpd(10, 14);
        let z0 = c(0.6, -0.2);
        let mut prev = 0.0;
        for n in 0..=10 {
            let f = cholesky(&s.leading(n)).unwrap();
            let k = kernel_diag(&f, z0).unwrap();
            assert!(k.value >= prev - 1e-12);
            prev = k.value;
        }
    }

    #[test]
    fn kernel_overflow_paths() {
        let f = cholesky(&HermitianSection::identity(400)).unwrap();
        // way out: order * ln|z0| > 600
        let err = kernel_diag(&f, c(8.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
        // in range but enormous: finite path through the rescaled solve
        let k = kernel_diag(&f, c(2.0, 0.0)).unwrap();
        assert!(k.value.is_infinite() || k.value > 1e240);
    }

    #[test]
    fn monic_norms_match_lu_determinant_ratios() {
        let s = random_hpd(7, 15);
        let f = cholesky(&s).unwrap();
        let norms = monic_norms(&f);
        let mut prev_det = 1.0;
        for n in 0..=7usize {
            let rows: Vec<Vec<Complex64>> =
                (0..=n).map(|j| (0..=n).map(|k| s.at(j, k)).collect()).collect();
            let det = Lu::factor(&rows).unwrap().det().re;
            let ratio = det / prev_det;
            assert!(
                (norms[n] - ratio).abs() <= 1e-9 * ratio.abs().max(1.0),
                "order {n}: norm {} vs det ratio {}",
                norms[n],
                ratio
            );
            prev_det = det;
        }
    }

    #[test]
    fn monic_norm_matches_explicit_gram_product() {
        let s = random_hpd(6, 16);
        let f = cholesky(&s).unwrap();
        let basis = orthonormal_coeffs(&f);
        let norms = monic_norms(&f);
        for n in 0..=6 {
            // monic coefficients: row / leading coefficient
            let lead = basis.row(n)[n];
            let monic: Vec<Complex64> = basis.row(n).iter().map(|&v| v / lead).collect();
            let mut q = Complex64::ZERO;
            for p in 0..=n {
                for r in 0..=n {
                    q += monic[p] * s.at(p, r) * monic[r].conj();
                }
            }
            assert!((q.re - norms[n]).abs() < 1e-9 * norms[n].max(1.0));
            assert!(q.im.abs() < 1e-10);
        }
    }

    #[test]
    fn schur_complement_consistency() {
        // K_n(z0,z0) equals the dense-inverse quadratic form k* M⁻¹ k
        for (order, seed) in [(5usize, 17u64), (12, 18)] {
            let s = random_hpd(order, seed);
            let f = cholesky(&s).unwrap();
            let rows: Vec<Vec<Complex64>> = (0..=order)
                .map(|j| (0..=order).map(|k| s.at(j, k)).collect())
                .collect();
            let inv = Lu::factor(&rows).unwrap().inverse().unwrap();
            for z0 in [c(0.5, 0.0), c(-0.3, 0.9)] {
                let mut pow = Vec::with_capacity(order + 1);
                let mut p = Complex64::ONE;
                for _ in 0..=order {
                    pow.push(p);
                    p *= z0;
                }
                let mut quad = Complex64::ZERO;
                for j in 0..=order {
                    for k in 0..=order {
                        quad += pow[j].conj() * inv[j][k] * pow[k];
                    }
                }
                let kv = kernel_diag(&f, z0).unwrap();
                assert!(
                    (kv.value - quad.re).abs() <= 1e-8 * quad.re.abs().max(1.0),
                    "z0 = {z0}: kernel {} vs quadratic form {}",
                    kv.value,
                    quad.re
                );
            }
        }
    }

    #[test]
    fn kernel_extremality() {
        // any degree-n polynomial with q(z0) = 1 has ‖q‖² ≥ 1/K_n(z0,z0),
        // with equality at the normalized kernel polynomial
        let order = 6;
        let s = random_hpd(order, 19);
        let f = cholesky(&s).unwrap();
        let basis = orthonormal_coeffs(&f);
        let z0 = c(0.4, 0.25);
        let k = kernel_diag(&f, z0).unwrap();
        let bound = 1.0 / k.value;

        let norm2 = |coeffs: &[Complex64]| -> f64 {
            let mut q = Complex64::ZERO;
            for p in 0..coeffs.len() {
                for r in 0..coeffs.len() {
                    q += coeffs[p] * s.at(p, r) * coeffs[r].conj();
                }
            }
            q.re
        };

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
        for _ in 0..40 {
            let mut coeffs: Vec<Complex64> = (0..=order)
                .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let mut val = Complex64::ZERO;
            let mut p = Complex64::ONE;
            for &co in &coeffs {
                val += co * p;
                p *= z0;
            }
            if val.norm() < 1e-6 {
                continue;
            }
            for co in &mut coeffs {
                *co /= val;
            }
            assert!(norm2(&coeffs) >= bound - 1e-9);
        }

        // equality case: q = K_n(·, z0) / K_n(z0, z0)
        let phi = basis.eval_phi(z0);
        let mut cd = vec![Complex64::ZERO; order + 1];
        for i in 0..=order {
            for j in 0..=i {
                cd[j] += phi[i].conj() * basis.row(i)[j];
            }
        }
        for coeff in &mut cd {
            *coeff /= c(k.value, 0.0);
        }
        assert!((norm2(&cd) - bound).abs() < 1e-9);
    }
}
