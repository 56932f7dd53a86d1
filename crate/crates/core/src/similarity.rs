//! Binomial similarity matrices A_n(α,β) for the affine change of variable
//! z ↦ αz + β, conjugation of Hermitian sections, and the two-path
//! cross-validation of the shifted index γ_{z0}.
//!
//! Conventions: A_n is upper triangular with A[j][k] = C(k,j) α^j β^{k−j};
//! sections conjugate as M̃ = Aᵀ M conj(A), which is exactly the moment matrix
//! of the pushforward measure and keeps leading blocks nested. The kernel
//! route is the production path for γ_{z0}; conjugation squares the condition
//! number and exists for validation.

use num_complex::Complex64;

use crate::error::{Error, Result, Warning};
use crate::hermitian::HermitianSection;
use crate::matrix_source::MatrixOracle;

/// z ↦ αz + β with α ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    alpha: Complex64,
    beta: Complex64,
}

impl AffineMap {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<AffineMap> {
        if alpha == Complex64::ZERO {
            return Err(Error::UnsupportedTransform("alpha must be nonzero".into()));
        }
        Ok(AffineMap { alpha, beta })
    }

    /// Translation by −z0, the map used for γ_{z0} cross-checks.
    pub fn shift_to_origin(z0: Complex64) -> AffineMap {
        AffineMap { alpha: Complex64::ONE, beta: -z0 }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.alpha * z + self.beta
    }

    pub fn inverse(&self) -> AffineMap {
        AffineMap { alpha: Complex64::ONE / self.alpha, beta: -self.beta / self.alpha }
    }

    /// self ∘ other, i.e. z ↦ self(other(z)).
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap { alpha: self.alpha * other.alpha, beta: self.alpha * other.beta + self.beta }
    }
}

/// Pascal recurrence in f64 overflows past this order.
pub const MAX_BINOMIAL_ORDER: usize = 1029;

/// Upper-triangular A_n(α,β) with A[j][k] = C(k,j) α^j β^{k−j}.
#[derive(Debug, Clone)]
pub struct BinomialMatrix {
    map: AffineMap,
    rows: Vec<Vec<Complex64>>,
}

pub fn binomial_matrix(n: usize, map: &AffineMap) -> Result<BinomialMatrix> {
    if n > MAX_BINOMIAL_ORDER {
        return Err(Error::UnsupportedTransform(format!(
            "binomial matrices are limited to order {MAX_BINOMIAL_ORDER}; requested {n}"
        )));
    }
    // Pascal triangle: binom[k][j] = C(k,j)
    let mut binom: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut row = vec![1.0; k + 1];
        for j in 1..k {
            row[j] = binom[k - 1][j - 1] + binom[k - 1][j];
        }
        binom.push(row);
    }
    let mut alpha_pow = Vec::with_capacity(n + 1);
    let mut beta_pow = Vec::with_capacity(n + 1);
    let (mut ap, mut bp) = (Complex64::ONE, Complex64::ONE);
    for _ in 0..=n {
        alpha_pow.push(ap);
        beta_pow.push(bp);
        ap *= map.alpha;
        bp *= map.beta;
    }
    let rows = (0..=n)
        .map(|j| (j..=n).map(|k| binom[k][j] * alpha_pow[j] * beta_pow[k - j]).collect())
        .collect();
    Ok(BinomialMatrix { map: *map, rows })
}

/// Closed-form inverse: A_n(α,β)⁻¹ = A_n(1/α, −β/α).
pub fn inverse_binomial(b: &BinomialMatrix) -> Result<BinomialMatrix> {
    binomial_matrix(b.order(), &b.map.inverse())
}

impl BinomialMatrix {
    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn map(&self) -> &AffineMap {
        &self.map
    }

    pub fn at(&self, j: usize, k: usize) -> Complex64 {
        if k >= j {
            self.rows[j][k - j]
        } else {
            Complex64::ZERO
        }
    }
}

/// M̃ = Aᵀ M conj(A): the section of the conjugated (pushforward) matrix, with
/// Hermitian symmetry re-enforced by mirroring the lower triangle.
pub fn conjugate_section(s: &HermitianSection, map: &AffineMap) -> Result<HermitianSection> {
    let n = s.order();
    let a = binomial_matrix(n, map)?;
    // lower-triangular C = Aᵀ: C[j][p] = C(j,p) α^p β^{j−p} for p ≤ j
    let c_at = |j: usize, p: usize| a.at(p, j);
    // tmp = C · M
    let mut tmp = vec![vec![Complex64::ZERO; n + 1]; n + 1];
    for j in 0..=n {
        for q in 0..=n {
            let mut acc = Complex64::ZERO;
            for p in 0..=j {
                acc += c_at(j, p) * s.at(p, q);
            }
            tmp[j][q] = acc;
        }
    }
    HermitianSection::from_lower(n, |j, k| {
        let mut acc = Complex64::ZERO;
        for q in 0..=k {
            acc += tmp[j][q] * c_at(k, q).conj();
        }
        Ok(acc)
    })
}

/// Result of validating γ_{z0}(M) = γ(M̃) along both computational paths.
#[derive(Debug, Clone)]
pub struct ShiftCrosscheck {
    /// γ_{z0,n} through the kernel route, order by order.
    pub direct: Vec<f64>,
    /// γ_n of the conjugated oracle A(1,−z0)·M·A*(1,−z0).
    pub conjugated: Vec<f64>,
    /// Max relative gap over the orders both paths reached.
    pub max_rel_gap: f64,
    /// Orders compared (the conjugated path may stop early: conjugation is
    /// quadratically worse conditioned).
    pub orders_compared: usize,
    pub warnings: Vec<Warning>,
}

/// Compute γ_{z0,n} directly (kernel) and through the conjugated oracle, and
/// report the worst relative disagreement on the common range of orders.
pub fn gamma_shift_crosscheck(
    o: &MatrixOracle,
    z0: Complex64,
    n_max: usize,
) -> Result<ShiftCrosscheck> {
    let map = AffineMap::shift_to_origin(z0);
    let direct_sweep = crate::indexes::factor_sweep(o, n_max, &[z0])?;
    let direct = direct_sweep.gammas_at.into_iter().next().expect("one requested point");

    let conj_oracle = MatrixOracle::conjugated(o.clone(), map);
    let conj_sweep = crate::indexes::factor_sweep(&conj_oracle, n_max, &[Complex64::ZERO])?;
    let conjugated = conj_sweep.gammas_at.into_iter().next().expect("one requested point");

    let orders_compared = direct.len().min(conjugated.len());
    let mut max_rel_gap = 0f64;
    for i in 0..orders_compared {
        let denom = direct[i].abs().max(f64::MIN_POSITIVE);
        max_rel_gap = max_rel_gap.max((direct[i] - conjugated[i]).abs() / denom);
    }
    let mut warnings = direct_sweep.warnings;
    warnings.extend(conj_sweep.warnings);
    if max_rel_gap > 1e-6 {
        warnings.push(Warning::ConditioningGap { max_rel_gap });
    }
    Ok(ShiftCrosscheck { direct, conjugated, max_rel_gap, orders_compared, warnings })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};

    use super::*;
    use crate::hermitian::cholesky;
    use crate::linalg::Lu;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn binomial_identity_map() {
        let a = binomial_matrix(2, &AffineMap::new(Complex64::ONE, Complex64::ZERO).unwrap())
            .unwrap();
        for j in 0..=2 {
            for k in 0..=2 {
                let want = if j == k { Complex64::ONE } else { Complex64::ZERO };
                assert_eq!(a.at(j, k), want);
            }
        }
    }

    #[test]
    fn binomial_shift_display() {
        let z0 = c(0.3, -0.4);
        let a = binomial_matrix(2, &AffineMap::shift_to_origin(z0)).unwrap();
        assert_eq!(a.at(0, 0), Complex64::ONE);
        assert_eq!(a.at(0, 1), -z0);
        assert!((a.at(0, 2) - z0 * z0).norm() < 1e-16);
        assert_eq!(a.at(1, 1), Complex64::ONE);
        assert!((a.at(1, 2) - (-2.0 * z0)).norm() < 1e-16);
        assert_eq!(a.at(2, 2), Complex64::ONE);
        assert_eq!(a.at(1, 0), Complex64::ZERO);
    }

    #[test]
    fn binomial_pure_scaling_is_diagonal() {
        let a = binomial_matrix(3, &AffineMap::new(c(2.0, 0.0), Complex64::ZERO).unwrap())
            .unwrap();
        for j in 0..=3 {
            for k in 0..=3 {
                let want = if j == k { c(2f64.powi(j as i32), 0.0) } else { Complex64::ZERO };
                assert_eq!(a.at(j, k), want);
            }
        }
    }

    #[test]
    fn inverse_of_shift_is_opposite_shift() {
        let z0 = c(0.7, 0.1);
        let a = binomial_matrix(4, &AffineMap::shift_to_origin(z0)).unwrap();
        let inv = inverse_binomial(&a).unwrap();
        assert_eq!(inv.map().alpha(), Complex64::ONE);
        assert!((inv.map().beta() - z0).norm() < 1e-16);
        // product residual
        for j in 0..=4 {
            for k in 0..=4 {
                let mut s = Complex64::ZERO;
                for p in 0..=4 {
                    s += a.at(j, p) * inv.at(p, k);
                }
                let want = if j == k { Complex64::ONE } else { Complex64::ZERO };
                assert!((s - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_product_residual_random_map() {
        let map = AffineMap::new(c(1.3, -0.4), c(0.2, 0.9)).unwrap();
        let a = binomial_matrix(6, &map).unwrap();
        let inv = inverse_binomial(&a).unwrap();
        for j in 0..=6 {
            for k in 0..=6 {
                let mut s = Complex64::ZERO;
                for p in 0..=6 {
                    s += a.at(j, p) * inv.at(p, k);
                }
                let want = if j == k { Complex64::ONE } else { Complex64::ZERO };
                assert!((s - want).norm() < 1e-12, "({j},{k}): {s}");
            }
        }
    }

    #[test]
    fn composition_multiplies_matrices() {
        let m1 = AffineMap::new(c(0.8, 0.2), c(-0.1, 0.4)).unwrap();
        let m2 = AffineMap::new(c(1.1, -0.3), c(0.5, 0.0)).unwrap();
        let composed = m1.compose(&m2);
        let n = 10;
        let a1 = binomial_matrix(n, &m1).unwrap();
        let a2 = binomial_matrix(n, &m2).unwrap();
        let ac = binomial_matrix(n, &composed).unwrap();
        // with the upper-triangular convention: A(m1 ∘ m2) = A(m2) · A(m1)
        for j in 0..=n {
            for k in 0..=n {
                let mut s = Complex64::ZERO;
                for p in 0..=n {
                    s += a2.at(j, p) * a1.at(p, k);
                }
                assert!(
                    (s - ac.at(j, k)).norm() <= 1e-10 * (1.0 + ac.at(j, k).norm()),
                    "({j},{k})"
                );
            }
        }
    }

    #[test]
    fn binomial_order_cap() {
        let map = AffineMap::shift_to_origin(c(0.1, 0.0));
        assert!(binomial_matrix(MAX_BINOMIAL_ORDER, &map).is_ok());
        assert!(matches!(
            binomial_matrix(MAX_BINOMIAL_ORDER + 1, &map),
            Err(Error::UnsupportedTransform(_))
        ));
    }

    #[test]
    fn conjugate_by_identity_is_identity() {
        let s = HermitianSection::identity(3);
        let map = AffineMap::new(Complex64::ONE, Complex64::ZERO).unwrap();
        let out = conjugate_section(&s, &map).unwrap();
        assert_eq!(out, s);
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
    fn conjugation_preserves_positive_definiteness() {
        let s = random_hpd(8, 40);
        for map in [
            AffineMap::shift_to_origin(c(0.3, -0.6)),
            AffineMap::new(c(0.5, 1.1), c(-0.2, 0.0)).unwrap(),
        ] {
            let out = conjugate_section(&s, &map).unwrap();
            assert!(cholesky(&out).is_ok());
        }
    }

    #[test]
    fn conjugated_inverse_corner_is_kernel_quadratic_form() {
        // e0* M̃⁻¹ e0 = k_{z0}* M⁻¹ k_{z0}
        for (order, seed) in [(5usize, 41u64), (12, 42)] {
            let s = random_hpd(order, seed);
            let z0 = c(0.45, -0.15);
            let mt = conjugate_section(&s, &AffineMap::shift_to_origin(z0)).unwrap();
            let rows = |sec: &HermitianSection| -> Vec<Vec<Complex64>> {
                (0..=order).map(|j| (0..=order).map(|k| sec.at(j, k)).collect()).collect()
            };
            let inv_mt = Lu::factor(&rows(&mt)).unwrap().inverse().unwrap();
            let inv_m = Lu::factor(&rows(&s)).unwrap().inverse().unwrap();
            let mut pow = Vec::with_capacity(order + 1);
            let mut p = Complex64::ONE;
            for _ in 0..=order {
                pow.push(p);
                p *= z0;
            }
            let mut quad = Complex64::ZERO;
            for j in 0..=order {
                for k in 0..=order {
                    quad += pow[j].conj() * inv_m[j][k] * pow[k];
                }
            }
            let corner = inv_mt[0][0];
            assert!(
                (corner.re - quad.re).abs() <= 1e-8 * quad.re.abs().max(1.0),
                "order {order}: corner {} vs kernel form {}",
                corner.re,
                quad.re
            );
        }
    }
}
