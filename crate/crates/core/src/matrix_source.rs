//! Lazy entry oracles for infinite Hermitian matrices: measure moments,
//! Toeplitz symbols, explicit data, affine conjugations and positive sums.
//!
//! Sections are always assembled from the lower triangle and mirrored, so
//! downstream factorizations see exactly Hermitian input regardless of
//! quadrature noise. Moment entries are memoized per oracle; sweeping n from
//! 0 to N costs O(N²) moment evaluations in total.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::hermitian::HermitianSection;
use crate::measures::{MeasureSpec, Moment, QuadratureConfig};
use crate::similarity::{conjugate_section, AffineMap};

/// Memoizing moment oracle for one measure.
///
/// Measures supported on a circle centered at 0 produce Toeplitz moments
/// c_{j,k} = r^{2 min(j,k)} c_{|j−k|,0}; the oracle detects that structure and
/// then only ever integrates first-column moments.
#[derive(Debug)]
pub struct MomentOracle {
    measure: MeasureSpec,
    quad: QuadratureConfig,
    toeplitz_radius: Option<f64>,
    cache: RwLock<HashMap<(usize, usize), Moment>>,
    warnings: Mutex<Vec<Warning>>,
}

impl Clone for MomentOracle {
    fn clone(&self) -> Self {
        MomentOracle {
            measure: self.measure.clone(),
            quad: self.quad.clone(),
            toeplitz_radius: self.toeplitz_radius,
            cache: RwLock::new(self.cache.read().expect("cache lock").clone()),
            warnings: Mutex::new(self.warnings.lock().expect("warning lock").clone()),
        }
    }
}

impl MomentOracle {
    fn new(measure: MeasureSpec, quad: QuadratureConfig) -> Result<MomentOracle> {
        measure.validate()?;
        quad.validate()?;
        let toeplitz_radius = measure.toeplitz_radius();
        Ok(MomentOracle {
            measure,
            quad,
            toeplitz_radius,
            cache: RwLock::new(HashMap::new()),
            warnings: Mutex::new(Vec::new()),
        })
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    /// Memoized moment for canonical indices j ≥ k.
    fn cached_moment(&self, j: usize, k: usize) -> Result<Moment> {
        debug_assert!(j >= k);
        if let Some(m) = self.cache.read().expect("cache lock").get(&(j, k)) {
            return Ok(*m);
        }
        let m = self.measure.moment(j, k, &self.quad)?;
        let mut cache = self.cache.write().expect("cache lock");
        if cache.insert((j, k), m).is_none() && !m.converged {
            self.warnings
                .lock()
                .expect("warning lock")
                .push(Warning::NonConvergedQuadrature { j, k, error_bound: m.error_bound });
        }
        Ok(m)
    }

    /// Moment with error bound for any index pair.
    pub fn moment_at(&self, j: usize, k: usize) -> Result<Moment> {
        if let Some(r) = self.toeplitz_radius {
            let (lo, d) = (j.min(k), j.max(k) - j.min(k));
            let base = self.cached_moment(d, 0)?;
            let scale = r.powi(2 * lo as i32);
            let value = if j >= k { base.value } else { base.value.conj() };
            return Ok(Moment {
                value: scale * value,
                error_bound: scale * base.error_bound,
                converged: base.converged,
            });
        }
        if j >= k {
            self.cached_moment(j, k)
        } else {
            let m = self.cached_moment(k, j)?;
            Ok(Moment { value: m.value.conj(), ..m })
        }
    }
}

/// File schema for explicit Hermitian matrices:
/// `{"n": order, "entries": [[[re, im], ...], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitMatrixFile {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

/// Uniform lazy source for entries of an infinite Hermitian matrix.
#[derive(Debug, Clone)]
pub enum MatrixOracle {
    Moment(MomentOracle),
    /// c_{j,k} = coeff(j−k); orders missing from the map are zero.
    ToeplitzSymbol { coeffs: BTreeMap<i64, Complex64> },
    Explicit(HermitianSection),
    /// A_n(α,β) · M_n · A*_n(α,β); realized through section materialization.
    Conjugated { inner: Box<MatrixOracle>, map: AffineMap },
    Sum { parts: Vec<(MatrixOracle, f64)> },
}

impl MatrixOracle {
    pub fn moment(measure: MeasureSpec, quad: QuadratureConfig) -> Result<MatrixOracle> {
        Ok(MatrixOracle::Moment(MomentOracle::new(measure, quad)?))
    }

    /// Validate conjugate symmetry and mirror missing negative orders.
    pub fn toeplitz_symbol(coeffs: BTreeMap<i64, Complex64>) -> Result<MatrixOracle> {
        let mut normalized: BTreeMap<i64, Complex64> = BTreeMap::new();
        if let Some(c0) = coeffs.get(&0) {
            if c0.im.abs() > 1e-12 * (c0.re.abs() + 1.0) {
                return Err(Error::NotHermitian { max_dev: c0.im.abs() });
            }
            normalized.insert(0, Complex64::new(c0.re, 0.0));
        }
        for (&d, &c) in &coeffs {
            if d == 0 {
                continue;
            }
            if let Some(&other) = coeffs.get(&-d) {
                let dev = (other - c.conj()).norm() / 2.0;
                if dev > 1e-12 * (c.norm() + 1.0) {
                    return Err(Error::NotHermitian { max_dev: dev });
                }
            }
            normalized.insert(d, c);
            normalized.entry(-d).or_insert_with(|| c.conj());
        }
        Ok(MatrixOracle::ToeplitzSymbol { coeffs: normalized })
    }

    pub fn explicit(rows: &[Vec<Complex64>]) -> Result<MatrixOracle> {
        Ok(MatrixOracle::Explicit(HermitianSection::from_rows(rows, 1e-12)?))
    }

    pub fn explicit_from_json(text: &str) -> Result<MatrixOracle> {
        let file: ExplicitMatrixFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidMeasure(format!("explicit matrix JSON: {e}")))?;
        let size = file.n + 1;
        if file.entries.len() != size || file.entries.iter().any(|r| r.len() != size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: file.entries.len(),
            });
        }
        let rows: Vec<Vec<Complex64>> = file
            .entries
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        MatrixOracle::explicit(&rows)
    }

    /// Serialize a section in the explicit-matrix file schema.
    pub fn section_to_json(s: &HermitianSection) -> String {
        let file = ExplicitMatrixFile {
            n: s.order(),
            entries: (0..=s.order())
                .map(|j| (0..=s.order()).map(|k| [s.at(j, k).re, s.at(j, k).im]).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("schema serializes")
    }

    pub fn conjugated(inner: MatrixOracle, map: AffineMap) -> MatrixOracle {
        MatrixOracle::Conjugated { inner: Box::new(inner), map }
    }

    pub fn sum(parts: Vec<(MatrixOracle, f64)>) -> Result<MatrixOracle> {
        if parts.is_empty() {
            return Err(Error::InvalidMeasure("sum oracle needs at least one part".into()));
        }
        if parts.iter().any(|(_, s)| !(*s > 0.0)) {
            return Err(Error::InvalidMeasure("sum scales must be strictly positive".into()));
        }
        Ok(MatrixOracle::Sum { parts })
    }

    /// Single matrix entry. Deterministic and memoized for moment oracles;
    /// conjugated oracles delegate to section materialization.
    pub fn entry(&self, j: usize, k: usize) -> Result<Complex64> {
        match self {
            MatrixOracle::Moment(m) => Ok(m.moment_at(j, k)?.value),
            MatrixOracle::ToeplitzSymbol { coeffs } => {
                Ok(coeffs.get(&(j as i64 - k as i64)).copied().unwrap_or(Complex64::ZERO))
            }
            MatrixOracle::Explicit(s) => {
                if j >= s.size() || k >= s.size() {
                    return Err(Error::IndexOutOfRange { j, k, size: s.size() });
                }
                Ok(s.at(j, k))
            }
            MatrixOracle::Conjugated { .. } => Ok(self.section(j.max(k))?.at(j, k)),
            MatrixOracle::Sum { parts } => {
                let mut acc = Complex64::ZERO;
                for (o, scale) in parts {
                    acc += scale * o.entry(j, k)?;
                }
                Ok(acc)
            }
        }
    }

    /// Dense (n+1)×(n+1) truncation, exactly Hermitian by construction.
    pub fn section(&self, n: usize) -> Result<HermitianSection> {
        match self {
            MatrixOracle::Moment(m) => {
                HermitianSection::from_lower(n, |j, k| Ok(m.moment_at(j, k)?.value))
            }
            MatrixOracle::ToeplitzSymbol { .. } => {
                HermitianSection::from_lower(n, |j, k| self.entry(j, k))
            }
            MatrixOracle::Explicit(s) => {
                if n >= s.size() {
                    return Err(Error::IndexOutOfRange { j: n, k: n, size: s.size() });
                }
                Ok(s.leading(n))
            }
            MatrixOracle::Conjugated { inner, map } => {
                conjugate_section(&inner.section(n)?, map)
            }
            MatrixOracle::Sum { parts } => {
                let sections = parts
                    .iter()
                    .map(|(o, s)| Ok((o.section(n)?, *s)))
                    .collect::<Result<Vec<_>>>()?;
                HermitianSection::from_lower(n, |j, k| {
                    let mut acc = Complex64::ZERO;
                    for (sec, scale) in &sections {
                        acc += scale * sec.at(j, k);
                    }
                    Ok(acc)
                })
            }
        }
    }

    /// Warnings accumulated by the underlying moment oracles so far.
    pub fn warnings(&self) -> Vec<Warning> {
        match self {
            MatrixOracle::Moment(m) => m.warnings.lock().expect("warning lock").clone(),
            MatrixOracle::Conjugated { inner, .. } => inner.warnings(),
            MatrixOracle::Sum { parts } => {
                parts.iter().flat_map(|(o, _)| o.warnings()).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Weight the backing measure places on the point z0, if this oracle is
    /// measure-backed (conjugations pull z0 back through the affine map).
    pub fn atom_weight_at(&self, z0: Complex64) -> f64 {
        const ATOM_TOL: f64 = 1e-9;
        match self {
            MatrixOracle::Moment(m) => m.measure.atom_weight_at(z0, ATOM_TOL),
            MatrixOracle::Conjugated { inner, map } => {
                inner.atom_weight_at(map.inverse().apply(z0))
            }
            MatrixOracle::Sum { parts } => {
                parts.iter().map(|(o, s)| s * o.atom_weight_at(z0)).sum()
            }
            _ => 0.0,
        }
    }

    /// Largest order addressable by every constituent oracle, when finite.
    pub fn max_order(&self) -> Option<usize> {
        match self {
            MatrixOracle::Explicit(s) => Some(s.order()),
            MatrixOracle::Conjugated { inner, .. } => inner.max_order(),
            MatrixOracle::Sum { parts } => {
                parts.iter().filter_map(|(o, _)| o.max_order()).min()
            }
            _ => None,
        }
    }
}

/// Symbol of the paper's running Toeplitz example with parameter a:
/// coeff(d) = (−a)^{|d|}, truncated at |d| ≤ max_order.
pub fn geometric_symbol(a: f64, max_order: i64) -> BTreeMap<i64, Complex64> {
    let mut coeffs = BTreeMap::new();
    for d in -max_order..=max_order {
        coeffs.insert(d, Complex64::new((-a).powi(d.unsigned_abs() as i32), 0.0));
    }
    coeffs
}
