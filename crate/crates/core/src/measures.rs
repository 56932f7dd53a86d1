//! Compactly supported measures on ℂ and their complex moments
//! c_{j,k} = ∫ z^j conj(z)^k dμ.
//!
//! Density variants are given on the curve parameter t ∈ [0, 2π) and are
//! integrated against the normalized parameter measure dt/(2π), so `lebesgue`
//! (w ≡ 1) on the unit circle is the normalized arc measure with total mass 1.
//! No |z'(t)| factor is applied; a curve density must already include it if
//! arclength weighting is intended.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serialize complex numbers as two-element `[re, im]` arrays.
pub mod serde_complex {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [c.re, c.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

mod serde_coeff_map {
    use std::collections::BTreeMap;

    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<i64, Complex64>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let plain: BTreeMap<i64, [f64; 2]> = m.iter().map(|(&k, c)| (k, [c.re, c.im])).collect();
        plain.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<i64, Complex64>, D::Error> {
        let plain = BTreeMap::<i64, [f64; 2]>::deserialize(d)?;
        Ok(plain.into_iter().map(|(k, [re, im])| (k, Complex64::new(re, im))).collect())
    }
}

/// Node-doubling rule for the periodic trapezoid quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_initial_nodes")]
    pub initial_nodes: usize,
    #[serde(default = "default_max_nodes")]
    pub max_nodes: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

fn default_initial_nodes() -> usize {
    512
}
fn default_max_nodes() -> usize {
    65536
}
fn default_rel_tol() -> f64 {
    1e-12
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            initial_nodes: default_initial_nodes(),
            max_nodes: default_max_nodes(),
            rel_tol: default_rel_tol(),
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.initial_nodes.is_power_of_two() || !self.max_nodes.is_power_of_two() {
            return Err(Error::InvalidMeasure("quadrature node counts must be powers of two".into()));
        }
        if self.initial_nodes > self.max_nodes {
            return Err(Error::InvalidMeasure("initial_nodes exceeds max_nodes".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidMeasure("quadrature rel_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Density on the parameter t ∈ [0, 2π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DensitySpec {
    /// Built-in family. `lebesgue` is w ≡ 1; `geometric` with parameter |a| < 1
    /// is w(t) = Σ_n (−a)^{|n|} e^{int} = (1 − a²)/(1 + 2a·cos t + a²).
    NamedFamily {
        family: String,
        #[serde(default)]
        params: Vec<f64>,
    },
    /// Conjugate-symmetric Fourier coefficients; negative orders may be
    /// omitted and are mirrored from the positive ones.
    FourierCoefficients {
        #[serde(with = "serde_coeff_map")]
        fourier: BTreeMap<i64, Complex64>,
    },
    /// Nonnegative samples on a uniform grid over [0, 2π), interpolated
    /// linearly and periodically.
    SampledGrid { samples: Vec<f64> },
}

impl DensitySpec {
    pub fn lebesgue() -> Self {
        DensitySpec::NamedFamily { family: "lebesgue".into(), params: vec![] }
    }

    pub fn geometric(a: f64) -> Self {
        DensitySpec::NamedFamily { family: "geometric".into(), params: vec![a] }
    }

    pub fn validate(&self) -> Result<()> {
        self.compile().map(|_| ())
    }

    /// Evaluate w(t). Fails on invalid specs, not on negative values; the
    /// quadrature checks sign at its own nodes.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.compile()?.eval(t))
    }

    pub(crate) fn compile(&self) -> Result<CompiledDensity> {
        match self {
            DensitySpec::NamedFamily { family, params } => match family.as_str() {
                "lebesgue" => {
                    if !params.is_empty() {
                        return Err(Error::InvalidMeasure("lebesgue takes no parameters".into()));
                    }
                    Ok(CompiledDensity::Const(1.0))
                }
                "geometric" => {
                    if params.len() != 1 {
                        return Err(Error::InvalidMeasure(
                            "geometric takes exactly one parameter".into(),
                        ));
                    }
                    let a = params[0];
                    if !(a.abs() < 1.0) {
                        return Err(Error::InvalidMeasure(format!(
                            "geometric parameter must satisfy |a| < 1, got {a}"
                        )));
                    }
                    Ok(CompiledDensity::Geometric { a })
                }
                other => Err(Error::InvalidMeasure(format!("unknown density family `{other}`"))),
            },
            DensitySpec::FourierCoefficients { fourier } => {
                let c0 = fourier.get(&0).copied().unwrap_or(Complex64::ZERO);
                if !(c0.re > 0.0) || c0.im.abs() > 1e-12 * c0.re.abs().max(1.0) {
                    return Err(Error::InvalidMeasure(
                        "fourier coefficient of order 0 must be real positive".into(),
                    ));
                }
                let mut positive: BTreeMap<i64, Complex64> = BTreeMap::new();
                for (&n, &c) in fourier {
                    if n == 0 {
                        continue;
                    }
                    let (idx, val) = if n > 0 { (n, c) } else { (-n, c.conj()) };
                    match positive.get(&idx) {
                        None => {
                            positive.insert(idx, val);
                        }
                        Some(&seen) => {
                            if (seen - val).norm() > 1e-12 * (seen.norm() + 1.0) {
                                return Err(Error::InvalidMeasure(format!(
                                    "fourier coefficients at orders ±{idx} are not conjugate-symmetric"
                                )));
                            }
                        }
                    }
                }
                Ok(CompiledDensity::Fourier {
                    c0: c0.re,
                    terms: positive.into_iter().collect(),
                })
            }
            DensitySpec::SampledGrid { samples } => {
                if samples.is_empty() {
                    return Err(Error::InvalidMeasure("sampled density needs at least one value".into()));
                }
                for (i, &v) in samples.iter().enumerate() {
                    if !v.is_finite() || v < 0.0 {
                        return Err(Error::InvalidMeasure(format!(
                            "sampled density value {v} at index {i} is not a finite nonnegative real"
                        )));
                    }
                }
                Ok(CompiledDensity::Sampled(samples.clone()))
            }
        }
    }
}

pub(crate) enum CompiledDensity {
    Const(f64),
    Geometric { a: f64 },
    Fourier { c0: f64, terms: Vec<(i64, Complex64)> },
    Sampled(Vec<f64>),
}

impl CompiledDensity {
    pub(crate) fn eval(&self, t: f64) -> f64 {
        match self {
            CompiledDensity::Const(c) => *c,
            CompiledDensity::Geometric { a } => {
                (1.0 - a * a) / (1.0 + 2.0 * a * t.cos() + a * a)
            }
            CompiledDensity::Fourier { c0, terms } => {
                let mut w = *c0;
                for &(n, c) in terms {
                    w += 2.0 * (c * Complex64::new(0.0, n as f64 * t).exp()).re;
                }
                w
            }
            CompiledDensity::Sampled(v) => {
                let m = v.len();
                let pos = (t.rem_euclid(TAU)) / TAU * m as f64;
                let i0 = pos.floor() as usize % m;
                let frac = pos - pos.floor();
                v[i0] * (1.0 - frac) + v[(i0 + 1) % m] * frac
            }
        }
    }
}

/// Built-in 2π-periodic Jordan curves with smooth injective parametrizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveFamily {
    Circle {
        #[serde(default = "zero_complex", with = "serde_complex")]
        center: Complex64,
        radius: f64,
    },
    Ellipse {
        #[serde(default = "zero_complex", with = "serde_complex")]
        center: Complex64,
        semiaxes: (f64, f64),
        #[serde(default)]
        rotation: f64,
    },
}

fn zero_complex() -> Complex64 {
    Complex64::ZERO
}

impl CurveFamily {
    pub fn validate(&self) -> Result<()> {
        match self {
            CurveFamily::Circle { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidMeasure("circle radius must be positive".into()));
                }
            }
            CurveFamily::Ellipse { semiaxes: (a, b), .. } => {
                if !(*a > 0.0) || !(*b > 0.0) {
                    return Err(Error::InvalidMeasure("ellipse semiaxes must be positive".into()));
                }
            }
        }
        Ok(())
    }

    /// z(t) for t ∈ [0, 2π).
    pub fn point(&self, t: f64) -> Complex64 {
        match self {
            CurveFamily::Circle { center, radius } => {
                center + radius * Complex64::new(0.0, t).exp()
            }
            CurveFamily::Ellipse { center, semiaxes: (a, b), rotation } => {
                let u = Complex64::new(a * t.cos(), b * t.sin());
                center + Complex64::new(0.0, *rotation).exp() * u
            }
        }
    }

    /// Whether z lies strictly inside the curve.
    pub fn encloses(&self, z: Complex64) -> bool {
        match self {
            CurveFamily::Circle { center, radius } => (z - center).norm() < *radius,
            CurveFamily::Ellipse { center, semiaxes: (a, b), rotation } => {
                let w = Complex64::new(0.0, -*rotation).exp() * (z - center);
                (w.re / a).powi(2) + (w.im / b).powi(2) < 1.0
            }
        }
    }
}

/// One weighted point of an atomic measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    #[serde(with = "serde_complex")]
    pub point: Complex64,
    pub weight: f64,
}

/// One scaled part of a sum measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SumPart {
    pub measure: MeasureSpec,
    pub scale: f64,
}

/// A compactly supported positive measure on ℂ.
///
/// Countable atomic measures are represented by a finite truncation plus a
/// caller-declared tail bound; the library propagates that bound into moment
/// error estimates and never invents one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasureSpec {
    CircleDensity {
        density: DensitySpec,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "zero_complex", with = "serde_complex")]
        center: Complex64,
    },
    CurveDensity {
        curve: CurveFamily,
        density: DensitySpec,
    },
    Atomic {
        atoms: Vec<Atom>,
        #[serde(default)]
        declared_tail_mass: f64,
        support_radius_bound: f64,
    },
    Sum {
        parts: Vec<SumPart>,
    },
}

fn one() -> f64 {
    1.0
}

/// A computed moment with its quadrature (or tail) error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: Complex64,
    pub error_bound: f64,
    /// False when quadrature hit `max_nodes` before meeting `rel_tol`.
    pub converged: bool,
}

impl MeasureSpec {
    /// Unit-mass Lebesgue measure on the unit circle.
    pub fn lebesgue_circle() -> Self {
        MeasureSpec::CircleDensity {
            density: DensitySpec::lebesgue(),
            radius: 1.0,
            center: Complex64::ZERO,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureSpec::CircleDensity { density, radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidMeasure("circle radius must be positive".into()));
                }
                density.validate()
            }
            MeasureSpec::CurveDensity { curve, density } => {
                curve.validate()?;
                density.validate()
            }
            MeasureSpec::Atomic { atoms, declared_tail_mass, support_radius_bound } => {
                if atoms.is_empty() {
                    return Err(Error::InvalidMeasure("atomic measure needs at least one atom".into()));
                }
                if !(*support_radius_bound > 0.0) {
                    return Err(Error::InvalidMeasure("support_radius_bound must be positive".into()));
                }
                if !(*declared_tail_mass >= 0.0) {
                    return Err(Error::InvalidMeasure("declared_tail_mass must be nonnegative".into()));
                }
                let slack = 1e-12 * support_radius_bound.max(1.0);
                for a in atoms {
                    if !(a.weight > 0.0) {
                        return Err(Error::InvalidMeasure("atom weights must be strictly positive".into()));
                    }
                    if a.point.norm() > support_radius_bound + slack {
                        return Err(Error::InvalidMeasure(format!(
                            "atom at |z| = {} lies outside the declared support radius {}",
                            a.point.norm(),
                            support_radius_bound
                        )));
                    }
                }
                Ok(())
            }
            MeasureSpec::Sum { parts } => {
                if parts.is_empty() {
                    return Err(Error::InvalidMeasure("sum measure needs at least one part".into()));
                }
                for p in parts {
                    if !(p.scale > 0.0) {
                        return Err(Error::InvalidMeasure("sum scales must be strictly positive".into()));
                    }
                    p.measure.validate()?;
                }
                Ok(())
            }
        }
    }

    /// c_{j,k} = ∫ z^j conj(z)^k dμ with an error bound.
    ///
    /// Density variants use the composite trapezoid rule on the uniform
    /// periodic grid, doubling the node count until two successive values
    /// agree within `rel_tol · (|value| + mass)`; the last difference is the
    /// reported bound. Atomic measures are summed exactly with the declared
    /// tail bound; sums combine parts linearly.
    pub fn moment(&self, j: usize, k: usize, q: &QuadratureConfig) -> Result<Moment> {
        q.validate()?;
        self.validate()?;
        self.moment_unchecked(j, k, q)
    }

    fn moment_unchecked(&self, j: usize, k: usize, q: &QuadratureConfig) -> Result<Moment> {
        match self {
            MeasureSpec::CircleDensity { density, radius, center } => {
                let w = density.compile()?;
                let (r, c) = (*radius, *center);
                density_moment(|t| c + r * Complex64::new(0.0, t).exp(), &w, j, k, q)
            }
            MeasureSpec::CurveDensity { curve, density } => {
                let w = density.compile()?;
                density_moment(|t| curve.point(t), &w, j, k, q)
            }
            MeasureSpec::Atomic { atoms, declared_tail_mass, support_radius_bound } => {
                let mut value = Complex64::ZERO;
                for a in atoms {
                    value += a.weight * a.point.powu(j as u32) * a.point.conj().powu(k as u32);
                }
                let error_bound = declared_tail_mass * support_radius_bound.powi((j + k) as i32);
                Ok(Moment { value, error_bound, converged: true })
            }
            MeasureSpec::Sum { parts } => {
                let mut value = Complex64::ZERO;
                let mut error_bound = 0.0;
                let mut converged = true;
                for p in parts {
                    let m = p.measure.moment_unchecked(j, k, q)?;
                    value += p.scale * m.value;
                    error_bound += p.scale * m.error_bound;
                    converged &= m.converged;
                }
                Ok(Moment { value, error_bound, converged })
            }
        }
    }

    /// Total mass, i.e. the (0,0) moment.
    pub fn total_mass(&self, q: &QuadratureConfig) -> Result<f64> {
        Ok(self.moment(0, 0, q)?.value.re)
    }

    /// Image measure under z ↦ αz + β. Mass is preserved; atoms move
    /// pointwise and curve parameters transform within the built-in families
    /// (a rotated circle becomes a circular ellipse so the parametrization,
    /// and with it the density, stays aligned).
    pub fn pushforward(&self, alpha: Complex64, beta: Complex64) -> Result<MeasureSpec> {
        if alpha == Complex64::ZERO {
            return Err(Error::UnsupportedTransform("alpha must be nonzero".into()));
        }
        Ok(match self {
            MeasureSpec::CircleDensity { density, radius, center } => {
                let new_center = alpha * center + beta;
                let new_radius = alpha.norm() * radius;
                if alpha.im == 0.0 && alpha.re > 0.0 {
                    MeasureSpec::CircleDensity {
                        density: density.clone(),
                        radius: new_radius,
                        center: new_center,
                    }
                } else {
                    MeasureSpec::CurveDensity {
                        curve: CurveFamily::Ellipse {
                            center: new_center,
                            semiaxes: (new_radius, new_radius),
                            rotation: alpha.arg(),
                        },
                        density: density.clone(),
                    }
                }
            }
            MeasureSpec::CurveDensity { curve, density } => {
                let new_curve = match curve {
                    CurveFamily::Circle { center, radius } => {
                        let new_center = alpha * center + beta;
                        let new_radius = alpha.norm() * radius;
                        if alpha.im == 0.0 && alpha.re > 0.0 {
                            CurveFamily::Circle { center: new_center, radius: new_radius }
                        } else {
                            CurveFamily::Ellipse {
                                center: new_center,
                                semiaxes: (new_radius, new_radius),
                                rotation: alpha.arg(),
                            }
                        }
                    }
                    CurveFamily::Ellipse { center, semiaxes: (a, b), rotation } => {
                        CurveFamily::Ellipse {
                            center: alpha * center + beta,
                            semiaxes: (alpha.norm() * a, alpha.norm() * b),
                            rotation: rotation + alpha.arg(),
                        }
                    }
                };
                MeasureSpec::CurveDensity { curve: new_curve, density: density.clone() }
            }
            MeasureSpec::Atomic { atoms, declared_tail_mass, support_radius_bound } => {
                MeasureSpec::Atomic {
                    atoms: atoms
                        .iter()
                        .map(|a| Atom { point: alpha * a.point + beta, weight: a.weight })
                        .collect(),
                    declared_tail_mass: *declared_tail_mass,
                    support_radius_bound: alpha.norm() * support_radius_bound + beta.norm(),
                }
            }
            MeasureSpec::Sum { parts } => MeasureSpec::Sum {
                parts: parts
                    .iter()
                    .map(|p| {
                        Ok(SumPart { measure: p.measure.pushforward(alpha, beta)?, scale: p.scale })
                    })
                    .collect::<Result<Vec<_>>>()?,
            },
        })
    }

    /// Total weight the measure places on the single point z0 (within tol).
    pub fn atom_weight_at(&self, z0: Complex64, tol: f64) -> f64 {
        match self {
            MeasureSpec::Atomic { atoms, .. } => atoms
                .iter()
                .filter(|a| (a.point - z0).norm() <= tol)
                .map(|a| a.weight)
                .sum(),
            MeasureSpec::Sum { parts } => {
                parts.iter().map(|p| p.scale * p.measure.atom_weight_at(z0, tol)).sum()
            }
            _ => 0.0,
        }
    }

    /// Whether the measure is supported on the unit circle |z| = 1.
    pub fn supported_on_unit_circle(&self, tol: f64) -> bool {
        match self {
            MeasureSpec::CircleDensity { radius, center, .. } => {
                (radius - 1.0).abs() <= tol && center.norm() <= tol
            }
            MeasureSpec::CurveDensity { curve, .. } => match curve {
                CurveFamily::Circle { center, radius } => {
                    (radius - 1.0).abs() <= tol && center.norm() <= tol
                }
                CurveFamily::Ellipse { center, semiaxes: (a, b), .. } => {
                    (a - 1.0).abs() <= tol && (b - 1.0).abs() <= tol && center.norm() <= tol
                }
            },
            MeasureSpec::Atomic { atoms, .. } => {
                atoms.iter().all(|a| (a.point.norm() - 1.0).abs() <= tol)
            }
            MeasureSpec::Sum { parts } => {
                parts.iter().all(|p| p.measure.supported_on_unit_circle(tol))
            }
        }
    }

    /// The curve carrying the measure, when there is a single one.
    pub fn support_curve(&self) -> Option<CurveFamily> {
        match self {
            MeasureSpec::CircleDensity { radius, center, .. } => {
                Some(CurveFamily::Circle { center: *center, radius: *radius })
            }
            MeasureSpec::CurveDensity { curve, .. } => Some(curve.clone()),
            _ => None,
        }
    }

    /// Common radius r such that c_{j,k} = r^{j+k} m(j−k), when the structure
    /// guarantees it (all support on a single circle centered at 0). Enables
    /// the Toeplitz fast path in moment oracles.
    pub fn toeplitz_radius(&self) -> Option<f64> {
        match self {
            MeasureSpec::CircleDensity { radius, center, .. } => {
                (*center == Complex64::ZERO).then_some(*radius)
            }
            MeasureSpec::CurveDensity { curve, .. } => match curve {
                CurveFamily::Circle { center, radius } => {
                    (*center == Complex64::ZERO).then_some(*radius)
                }
                CurveFamily::Ellipse { center, semiaxes: (a, b), .. } => {
                    (*center == Complex64::ZERO && a == b).then_some(*a)
                }
            },
            MeasureSpec::Atomic { atoms, .. } => {
                let r = atoms.first()?.point.norm();
                let tol = 1e-14 * r.max(1.0);
                (r > 0.0 && atoms.iter().all(|a| (a.point.norm() - r).abs() <= tol)).then_some(r)
            }
            MeasureSpec::Sum { parts } => {
                let mut radius = None;
                for p in parts {
                    let r = p.measure.toeplitz_radius()?;
                    match radius {
                        None => radius = Some(r),
                        Some(r0) if (r0 - r).abs() <= 1e-14 * r0.max(1.0) => {}
                        _ => return None,
                    }
                }
                radius
            }
        }
    }
}

fn density_moment(
    z: impl Fn(f64) -> Complex64,
    w: &CompiledDensity,
    j: usize,
    k: usize,
    q: &QuadratureConfig,
) -> Result<Moment> {
    let mut nodes = q.initial_nodes;
    let mut prev: Option<Complex64> = None;
    loop {
        let mut sum = Complex64::ZERO;
        let mut mass = 0.0;
        for i in 0..nodes {
            let t = TAU * i as f64 / nodes as f64;
            let wt = w.eval(t);
            if wt < 0.0 {
                return Err(Error::NegativeDensity { parameter: t, value: wt });
            }
            let zt = z(t);
            sum += zt.powu(j as u32) * zt.conj().powu(k as u32) * wt;
            mass += wt;
        }
        let value = sum / nodes as f64;
        let mass = mass / nodes as f64;
        if let Some(p) = prev {
            let diff = (value - p).norm();
            if diff <= q.rel_tol * (value.norm() + mass) {
                return Ok(Moment { value, error_bound: diff, converged: true });
            }
            if nodes >= q.max_nodes {
                return Ok(Moment { value, error_bound: diff, converged: false });
            }
        } else if nodes >= q.max_nodes {
            // Single level available: no successive difference to report.
            return Ok(Moment { value, error_bound: value.norm() + mass, converged: false });
        }
        prev = Some(value);
        nodes *= 2;
    }
}

/// Geometric mean exp((1/2π) ∫ log w dθ) of a circle density; the classical
/// Szegő expression for γ of the corresponding Toeplitz moment matrix.
/// Returns 0 when the density vanishes (or goes negative) at any node.
pub fn szego_integral(d: &DensitySpec, q: &QuadratureConfig) -> Result<Moment> {
    q.validate()?;
    let w = d.compile()?;
    let mut nodes = q.initial_nodes;
    let mut prev: Option<f64> = None;
    loop {
        let mut sum = 0.0;
        for i in 0..nodes {
            let t = TAU * i as f64 / nodes as f64;
            let wt = w.eval(t);
            if wt < 0.0 {
                return Err(Error::NegativeDensity { parameter: t, value: wt });
            }
            if wt == 0.0 {
                return Ok(Moment { value: Complex64::ZERO, error_bound: 0.0, converged: true });
            }
            sum += wt.ln();
        }
        let value = (sum / nodes as f64).exp();
        if let Some(p) = prev {
            let diff = (value - p).abs();
            if diff <= q.rel_tol * (value.abs() + 1.0) {
                return Ok(Moment { value: value.into(), error_bound: diff, converged: true });
            }
            if nodes >= q.max_nodes {
                return Ok(Moment { value: value.into(), error_bound: diff, converged: false });
            }
        } else if nodes >= q.max_nodes {
            return Ok(Moment { value: value.into(), error_bound: value.abs(), converged: false });
        }
        prev = Some(value);
        nodes *= 2;
    }
}

/// The paper's running atomic example: atoms at e^{2πi/n} with weights 2^{−n}
/// for n = 1..=truncation, declared tail mass 2^{−truncation}.
pub fn nested_circle_atoms(truncation: u32) -> MeasureSpec {
    let atoms = (1..=truncation)
        .map(|n| Atom {
            point: Complex64::new(0.0, TAU / n as f64).exp(),
            weight: 2f64.powi(-(n as i32)),
        })
        .collect();
    MeasureSpec::Atomic {
        atoms,
        declared_tail_mass: 2f64.powi(-(truncation as i32)),
        support_radius_bound: 1.0,
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lebesgue_circle_moments() {
        let m = MeasureSpec::lebesgue_circle();
        let m22 = m.moment(2, 2, &q()).unwrap();
        assert!((m22.value - c(1.0, 0.0)).norm() < 1e-14, "{:?}", m22);
        let m31 = m.moment(3, 1, &q()).unwrap();
        assert!(m31.value.norm() < 1e-14);
        assert!(m31.converged);
    }

    #[test]
    fn geometric_half_superdiagonal() {
        // first superdiagonal entry of the paper's Toeplitz matrix
        let m = MeasureSpec::CircleDensity {
            density: DensitySpec::geometric(0.5),
            radius: 1.0,
            center: Complex64::ZERO,
        };
        let v = m.moment(1, 0, &q()).unwrap();
        assert!((v.value - c(-0.5, 0.0)).norm() < 1e-12, "{:?}", v);
    }

    #[test]
    fn geometric_density_matches_closed_form() {
        // w(t) = (1-a^2)/(1+2a cos t+a^2) equals 3/(5+4 cos t) at a = 1/2
        let d = DensitySpec::geometric(0.5);
        for t in [0.0, 0.7, PI, 4.2] {
            let w = d.eval(t).unwrap();
            assert!((w - 3.0 / (5.0 + 4.0 * t.cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn atomic_example_moment_and_tail_bound() {
        let m = nested_circle_atoms(40);
        let v = m.moment(1, 1, &q()).unwrap();
        // direct summation oracle: sum of 2^-n for n = 1..40
        let expected: f64 = (1..=40).map(|n| 2f64.powi(-n)).sum();
        assert_eq!(v.value.re, expected);
        assert!(v.value.im.abs() < 1e-18);
        assert_eq!(v.error_bound, 2f64.powi(-40));
    }

    #[test]
    fn total_mass_examples() {
        assert!((MeasureSpec::lebesgue_circle().total_mass(&q()).unwrap() - 1.0).abs() < 1e-14);

        let atomic = MeasureSpec::Atomic {
            atoms: vec![
                Atom { point: c(0.0, 1.0), weight: 0.25 },
                Atom { point: c(0.0, -1.0), weight: 0.75 },
            ],
            declared_tail_mass: 0.0,
            support_radius_bound: 1.0,
        };
        assert_eq!(atomic.total_mass(&q()).unwrap(), 1.0);

        let r = 0.3;
        let sum = MeasureSpec::Sum {
            parts: vec![
                SumPart { measure: MeasureSpec::lebesgue_circle(), scale: 1.0 },
                SumPart { measure: MeasureSpec::lebesgue_circle(), scale: r },
            ],
        };
        assert!((sum.total_mass(&q()).unwrap() - (1.0 + r)).abs() < 1e-13);
    }

    #[test]
    fn hermitian_symmetry_of_moments() {
        let measures = [
            MeasureSpec::CircleDensity {
                density: DensitySpec::geometric(-0.3),
                radius: 1.2,
                center: c(0.1, -0.2),
            },
            MeasureSpec::CurveDensity {
                curve: CurveFamily::Ellipse { center: c(0.0, 0.1), semiaxes: (1.0, 0.5), rotation: 0.4 },
                density: DensitySpec::lebesgue(),
            },
            nested_circle_atoms(12),
        ];
        for m in &measures {
            for (j, k) in [(0, 1), (2, 3), (4, 1), (3, 3)] {
                let a = m.moment(j, k, &q()).unwrap();
                let b = m.moment(k, j, &q()).unwrap();
                assert!(
                    (a.value - b.value.conj()).norm() <= 1e-14 + a.error_bound + b.error_bound,
                    "symmetry broken at ({j},{k})"
                );
            }
        }
    }

    #[test]
    fn circle_centered_measures_are_toeplitz() {
        let m = MeasureSpec::CircleDensity {
            density: DensitySpec::geometric(0.4),
            radius: 1.0,
            center: Complex64::ZERO,
        };
        for (j, k) in [(0, 1), (1, 3), (2, 0)] {
            let a = m.moment(j, k, &q()).unwrap();
            let b = m.moment(j + 1, k + 1, &q()).unwrap();
            assert!((a.value - b.value).norm() <= a.error_bound + b.error_bound + 1e-14);
        }
        assert_eq!(m.toeplitz_radius(), Some(1.0));
    }

    #[test]
    fn pushforward_scaling_invariant() {
        // moments of the image under z -> alpha z obey c~_{jk} = alpha^j conj(alpha)^k c_{jk}
        let m = MeasureSpec::CircleDensity {
            density: DensitySpec::geometric(0.5),
            radius: 1.0,
            center: Complex64::ZERO,
        };
        let alpha = c(0.8, 0.6);
        let pushed = m.pushforward(alpha, Complex64::ZERO).unwrap();
        for (j, k) in [(1, 0), (2, 1), (3, 3)] {
            let base = m.moment(j, k, &q()).unwrap().value;
            let expect = alpha.powu(j as u32) * alpha.conj().powu(k as u32) * base;
            let got = pushed.moment(j, k, &q()).unwrap().value;
            assert!(
                (got - expect).norm() <= 1e-12 * (1.0 + expect.norm()),
                "({j},{k}): got {got}, expected {expect}"
            );
        }
    }

    #[test]
    fn pushforward_examples() {
        let atom = MeasureSpec::Atomic {
            atoms: vec![Atom { point: c(1.0, 0.0), weight: 1.0 }],
            declared_tail_mass: 0.0,
            support_radius_bound: 1.0,
        };
        match atom.pushforward(c(1.0, 0.0), c(-1.0, 0.0)).unwrap() {
            MeasureSpec::Atomic { atoms, .. } => {
                assert_eq!(atoms[0].point, Complex64::ZERO);
                assert_eq!(atoms[0].weight, 1.0);
            }
            other => panic!("unexpected variant {other:?}"),
        }

        let circle = MeasureSpec::CircleDensity {
            density: DensitySpec::lebesgue(),
            radius: 1.0,
            center: Complex64::ZERO,
        };
        match circle.pushforward(c(2.0, 0.0), c(0.0, 1.0)).unwrap() {
            MeasureSpec::CircleDensity { radius, center, .. } => {
                assert_eq!(radius, 2.0);
                assert_eq!(center, c(0.0, 1.0));
            }
            other => panic!("unexpected variant {other:?}"),
        }

        // rotation is absorbed into a circular ellipse, preserving moments
        let rotated = circle.pushforward(c(0.0, 1.0), Complex64::ZERO).unwrap();
        let got = rotated.moment(2, 2, &q()).unwrap().value;
        assert!((got - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(atom.pushforward(Complex64::ZERO, c(1.0, 0.0)).unwrap_err(),
            Error::UnsupportedTransform("alpha must be nonzero".into()));
    }

    #[test]
    fn positive_semidefinite_quadratic_forms() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let measures = [
            MeasureSpec::CircleDensity {
                density: DensitySpec::geometric(0.5),
                radius: 1.0,
                center: Complex64::ZERO,
            },
            nested_circle_atoms(10),
        ];
        for m in &measures {
            let mass = m.total_mass(&q()).unwrap();
            let deg = 12usize;
            let mut sect = vec![vec![Complex64::ZERO; deg + 1]; deg + 1];
            for j in 0..=deg {
                for k in 0..=deg {
                    sect[j][k] = m.moment(j, k, &q()).unwrap().value;
                }
            }
            for _ in 0..20 {
                let v: Vec<Complex64> = (0..=deg)
                    .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect();
                let norm2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
                let mut quad = Complex64::ZERO;
                for j in 0..=deg {
                    for k in 0..=deg {
                        quad += v[j] * sect[j][k] * v[k].conj();
                    }
                }
                assert!(quad.re >= -1e-10 * norm2 * mass, "quadratic form {quad} negative");
            }
        }
    }

    #[test]
    fn negative_density_is_rejected() {
        let d = DensitySpec::SampledGrid { samples: vec![1.0, -0.5, 1.0] };
        assert!(matches!(d.validate().unwrap_err(), Error::InvalidMeasure(_)));

        // fourier spec that dips negative: w(t) = 1 + 2cos t
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, c(1.0, 0.0));
        coeffs.insert(1, c(1.0, 0.0));
        let m = MeasureSpec::CircleDensity {
            density: DensitySpec::FourierCoefficients { fourier: coeffs },
            radius: 1.0,
            center: Complex64::ZERO,
        };
        assert!(matches!(m.moment(0, 0, &q()).unwrap_err(), Error::NegativeDensity { .. }));
    }

    #[test]
    fn fourier_mirroring_and_symmetry_check() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, c(2.0, 0.0));
        coeffs.insert(1, c(0.25, 0.5));
        let d = DensitySpec::FourierCoefficients { fourier: coeffs.clone() };
        // w(t) = 2 + 2 Re((0.25+0.5i) e^{it})
        let t = 0.9;
        let expect = 2.0 + 2.0 * (c(0.25, 0.5) * Complex64::new(0.0, t).exp()).re;
        assert!((d.eval(t).unwrap() - expect).abs() < 1e-14);

        coeffs.insert(-1, c(0.25, 0.5)); // not the conjugate
        let bad = DensitySpec::FourierCoefficients { fourier: coeffs };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn szego_integral_examples() {
        let v = szego_integral(&DensitySpec::lebesgue(), &q()).unwrap();
        assert!((v.value.re - 1.0).abs() < 1e-14);

        let v = szego_integral(&DensitySpec::geometric(0.5), &q()).unwrap();
        assert!((v.value.re - 0.75).abs() < 1e-10, "got {}", v.value.re);

        let scaled = DensitySpec::SampledGrid { samples: vec![0.35; 8] };
        let v = szego_integral(&scaled, &q()).unwrap();
        assert!((v.value.re - 0.35).abs() < 1e-14);
    }

    #[test]
    fn json_schema_round_trip() {
        let text = r#"{
            "type": "sum",
            "parts": [
                { "measure": { "type": "circle_density",
                               "density": { "family": "geometric", "params": [0.5] } },
                  "scale": 1.0 },
                { "measure": { "type": "atomic",
                               "atoms": [ { "point": [0.0, 1.0], "weight": 0.25 } ],
                               "support_radius_bound": 1.0 },
                  "scale": 0.5 }
            ]
        }"#;
        let m: MeasureSpec = serde_json::from_str(text).unwrap();
        m.validate().unwrap();
        match &m {
            MeasureSpec::Sum { parts } => {
                match &parts[0].measure {
                    MeasureSpec::CircleDensity { radius, center, .. } => {
                        assert_eq!(*radius, 1.0);
                        assert_eq!(*center, Complex64::ZERO);
                    }
                    other => panic!("unexpected {other:?}"),
                }
            }
            other => panic!("unexpected {other:?}"),
        }
        let text2 = serde_json::to_string(&m).unwrap();
        let m2: MeasureSpec = serde_json::from_str(&text2).unwrap();
        assert_eq!(m, m2);
    }

    #[test]
    fn curve_encloses() {
        let e = CurveFamily::Ellipse { center: Complex64::ZERO, semiaxes: (1.0, 0.6), rotation: 0.0 };
        assert!(e.encloses(Complex64::ZERO));
        assert!(e.encloses(c(0.9, 0.0)));
        assert!(!e.encloses(c(0.0, 0.7)));
        assert!(!e.encloses(c(2.0, 0.0)));
        let circ = CurveFamily::Circle { center: c(0.5, 0.0), radius: 1.0 };
        assert!(circ.encloses(Complex64::ZERO));
        assert!(!circ.encloses(c(-0.6, 0.0)));
    }
}
