//! Moments and free cumulants, the R- and K-transforms, numerical inversion
//! of `K` to obtain the Cauchy transform, and the free Poisson and free
//! Lévy–Khintchine cumulant families.
//!
//! The moment/cumulant conversion uses coefficient extraction from the
//! functional equation `M(z) = 1 + Σ_s R_s z^s M(z)^s` (with
//! `M(z) = Σ m_n z^n`), which is the generating-function form of the sum
//! over non-crossing partitions.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::measure::ClosedDensity;
use crate::numeric::Scalar;

/// Truncation order used by the numerical pipelines.
pub const DEFAULT_ORDER: usize = 16;
/// Required residual `|K(G) − z|` for [`invert_k`].
pub const INVERSION_TOL: f64 = 1e-10;

/// Moments `m_1, …, m_n` (the implicit `m_0 = 1` is not stored).
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence<T> {
    pub values: Vec<T>,
}

/// Free cumulants `R_1, …, R_n`, optionally tagged with the closed form of
/// their R-transform.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantSequence<T> {
    pub values: Vec<T>,
    pub generator: Option<RForm>,
}

impl<T: Scalar> MomentSequence<T> {
    pub fn new(values: Vec<T>) -> Self {
        MomentSequence { values }
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `m_k`, with `m_0 = 1`.
    pub fn get(&self, k: usize) -> T {
        if k == 0 {
            T::one()
        } else {
            self.values[k - 1].clone()
        }
    }

    pub fn to_f64(&self) -> MomentSequence<f64> {
        MomentSequence { values: self.values.iter().map(Scalar::to_f64).collect() }
    }
}

impl<T: Scalar> CumulantSequence<T> {
    pub fn new(values: Vec<T>) -> Self {
        CumulantSequence { values, generator: None }
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `R_k`, `k ≥ 1`.
    pub fn get(&self, k: usize) -> T {
        self.values[k - 1].clone()
    }

    pub fn to_f64(&self) -> CumulantSequence<f64> {
        CumulantSequence {
            values: self.values.iter().map(Scalar::to_f64).collect(),
            generator: self.generator.clone(),
        }
    }

    /// The R-transform this sequence determines: its closed form when
    /// known, otherwise the truncated series.
    pub fn r_transform(&self) -> RForm {
        self.generator
            .clone()
            .unwrap_or_else(|| RForm::Series(self.values.iter().map(Scalar::to_f64).collect()))
    }
}

/// Table `P[s][k] = [z^k] M(z)^s` for `s = 0..=n`, filled column by column
/// as moments become known.
struct PowerTable<T> {
    p: Vec<Vec<T>>,
}

impl<T: Scalar> PowerTable<T> {
    fn new(n: usize) -> Self {
        let mut p = vec![vec![T::zero(); n + 1]; n + 1];
        for row in p.iter_mut() {
            row[0] = T::one();
        }
        PowerTable { p }
    }

    /// Fills column `k` given moments `m_0..=m_k`.
    fn fill_column(&mut self, k: usize, m: &[T]) {
        let n = self.p.len() - 1;
        self.p[0][k] = if k == 0 { T::one() } else { T::zero() };
        for s in 1..=n {
            let mut acc = T::zero();
            for j in 0..=k {
                acc = acc + m[j].clone() * self.p[s - 1][k - j].clone();
            }
            self.p[s][k] = acc;
        }
    }
}

/// Free cumulants of a moment sequence (exact on exact input).
pub fn moments_to_cumulants<T: Scalar>(m: &MomentSequence<T>) -> CumulantSequence<T> {
    let n = m.order();
    let mut moments = vec![T::one()];
    moments.extend(m.values.iter().cloned());
    let mut table = PowerTable::new(n);
    let mut r: Vec<T> = Vec::with_capacity(n);
    for k in 1..=n {
        table.fill_column(k - 1, &moments);
        let mut rk = moments[k].clone();
        for s in 1..k {
            rk = rk - r[s - 1].clone() * table.p[s][k - s].clone();
        }
        r.push(rk);
    }
    CumulantSequence::new(r)
}

/// Moments of the measure with the given free cumulants.
pub fn cumulants_to_moments<T: Scalar>(r: &CumulantSequence<T>) -> MomentSequence<T> {
    let n = r.order();
    let mut moments = vec![T::one()];
    let mut table = PowerTable::new(n);
    for k in 1..=n {
        table.fill_column(k - 1, &moments);
        let mut mk = T::zero();
        for s in 1..=k {
            mk = mk + r.values[s - 1].clone() * table.p[s][k - s].clone();
        }
        moments.push(mk);
    }
    MomentSequence::new(moments.split_off(1))
}

/// An R-transform `R(w) = Σ R_n w^{n-1}`, with closed forms for the
/// families used by the limit-shape pipelines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RForm {
    /// Truncated series with coefficients `R_1, R_2, …`.
    Series(Vec<f64>),
    /// Cumulants `(0, 1, c, c², …)`: `R(w) = w / (1 − c w)`.
    Geometric(f64),
    /// Free Lévy–Khintchine form `R(w) = ∫ w|t| / (1 − w t) μ(dt)` for an
    /// atomic `μ` given as `(t, mass)` pairs.
    Levy(Vec<(f64, f64)>),
}

impl RForm {
    pub fn r(&self, w: Complex64) -> Complex64 {
        match self {
            RForm::Series(c) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for coef in c.iter().rev() {
                    acc = acc * w + coef;
                }
                acc
            }
            RForm::Geometric(c) => w / (1.0 - c * w),
            RForm::Levy(atoms) => atoms
                .iter()
                .map(|&(t, mass)| w * (t.abs() * mass) / (1.0 - w * t))
                .sum(),
        }
    }

    pub fn dr(&self, w: Complex64) -> Complex64 {
        match self {
            RForm::Series(c) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (n, coef) in c.iter().enumerate().skip(1).rev() {
                    acc = acc * w + coef * n as f64;
                }
                acc
            }
            RForm::Geometric(c) => {
                let d = 1.0 - c * w;
                1.0 / (d * d)
            }
            RForm::Levy(atoms) => atoms
                .iter()
                .map(|&(t, mass)| {
                    let d = 1.0 - w * t;
                    (t.abs() * mass) / (d * d)
                })
                .sum(),
        }
    }

    /// Growth constant `C` with `|R_n| ≤ C^n`.
    pub fn growth(&self) -> f64 {
        match self {
            RForm::Series(c) => c
                .iter()
                .enumerate()
                .map(|(n, r)| r.abs().powf(1.0 / (n + 1) as f64))
                .fold(0.0, f64::max),
            RForm::Geometric(c) => c.abs().max(1.0),
            RForm::Levy(atoms) => atoms.iter().map(|a| a.0.abs()).fold(1.0, f64::max),
        }
    }

    /// First `n` cumulants.
    pub fn coefficients(&self, n: usize) -> Vec<f64> {
        match self {
            RForm::Series(c) => (0..n).map(|k| c.get(k).copied().unwrap_or(0.0)).collect(),
            RForm::Geometric(c) => (1..=n)
                .map(|k| match k {
                    1 => 0.0,
                    _ => c.powi(k as i32 - 2),
                })
                .collect(),
            RForm::Levy(atoms) => (1..=n)
                .map(|k| match k {
                    1 => 0.0,
                    _ => atoms.iter().map(|&(t, m)| m * t.abs() * t.powi(k as i32 - 2)).sum(),
                })
                .collect(),
        }
    }
}

/// A K-function `K(w) = 1/w + R(w)` with its derivative.
pub trait KFunction: Sync {
    fn k(&self, w: Complex64) -> Complex64;
    fn dk(&self, w: Complex64) -> Complex64;
    /// Growth constant of the underlying cumulants; sets the start of the
    /// continuation path in [`invert_k`].
    fn growth(&self) -> f64 {
        1.0
    }
}

impl KFunction for RForm {
    fn k(&self, w: Complex64) -> Complex64 {
        w.inv() + self.r(w)
    }
    fn dk(&self, w: Complex64) -> Complex64 {
        -(w * w).inv() + self.dr(w)
    }
    fn growth(&self) -> f64 {
        RForm::growth(self)
    }
}

/// A K-function given by two closures.
pub struct KClosure<F, D> {
    pub k: F,
    pub dk: D,
    pub growth: f64,
}

impl<F, D> KFunction for KClosure<F, D>
where
    F: Fn(Complex64) -> Complex64 + Sync,
    D: Fn(Complex64) -> Complex64 + Sync,
{
    fn k(&self, w: Complex64) -> Complex64 {
        (self.k)(w)
    }
    fn dk(&self, w: Complex64) -> Complex64 {
        (self.dk)(w)
    }
    fn growth(&self) -> f64 {
        self.growth
    }
}

/// `K(z) = 1/z + Σ R_n z^{n-1}` (or its closed form when the sequence
/// carries one).
///
/// For a bare truncated series, `|z|` must not exceed `1/(2C)` with
/// `|R_n| ≤ C^n`.
pub fn k_transform_eval<T: Scalar>(r: &CumulantSequence<T>, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        return Err(Error::InvalidArgument("K-transform has a pole at z = 0".into()));
    }
    let form = r.r_transform();
    if let RForm::Series(_) = form {
        let guard = 1.0 / (2.0 * form.growth().max(f64::MIN_POSITIVE));
        if z.norm() > guard {
            return Err(Error::InvalidArgument(format!(
                "|z| = {} exceeds the series radius guard {guard}",
                z.norm()
            )));
        }
    }
    Ok(form.k(z))
}

/// Solves `K(G) = z` for the branch with `G(z) ~ 1/z` at infinity.
///
/// Newton's method is continued along the segment from `i·(10 + 2C)`
/// (where `G ≈ 1/z`) to `z`, with step halving on failure.
pub fn invert_k(k: &dyn KFunction, z: Complex64) -> Result<Complex64> {
    if z.im <= 0.0 {
        return Err(Error::InvalidArgument(format!("invert_k needs Im z > 0, got {z}")));
    }
    let z0 = Complex64::new(0.0, 10.0 + 2.0 * k.growth());
    let mut g = newton(k, z0, z0.inv(), 60).map_err(|trace| Error::NewtonFailure {
        z: z0.to_string(),
        trace,
    })?;
    let mut t = 0.0_f64;
    let mut h = 0.125_f64;
    let mut last_trace = Vec::new();
    while t < 1.0 {
        let step = h.min(1.0 - t);
        let zt = z0 + (z - z0) * (t + step);
        let prev_z = z0 + (z - z0) * t;
        let predictor = g + (zt - prev_z) / k.dk(g);
        match newton(k, zt, predictor, 40) {
            Ok(next) if next.im < 0.0 && (next - predictor).norm() <= 0.5 * predictor.norm() + 1e-12 => {
                g = next;
                t += step;
                h = (h * 2.0).min(0.25);
            }
            Ok(_) => {
                h *= 0.5;
            }
            Err(trace) => {
                last_trace = trace;
                h *= 0.5;
            }
        }
        if h < 1e-12 {
            return Err(Error::NewtonFailure { z: z.to_string(), trace: last_trace });
        }
    }
    let residual = (k.k(g) - z).norm();
    if residual > INVERSION_TOL * (1.0 + z.norm()) {
        return Err(Error::NewtonFailure { z: z.to_string(), trace: vec![residual] });
    }
    Ok(g)
}

fn newton(k: &dyn KFunction, z: Complex64, mut g: Complex64, max_iter: usize) -> Result<Complex64, Vec<f64>> {
    let mut trace = Vec::new();
    for _ in 0..max_iter {
        let f = k.k(g) - z;
        let res = f.norm();
        trace.push(res);
        if !res.is_finite() {
            return Err(trace);
        }
        if res < 1e-13 * (1.0 + z.norm()) {
            return Ok(g);
        }
        let d = k.dk(g);
        if d.norm() == 0.0 || !d.norm().is_finite() {
            return Err(trace);
        }
        g -= f / d;
    }
    let res = (k.k(g) - z).norm();
    if res < INVERSION_TOL * 1e-1 * (1.0 + z.norm()) {
        Ok(g)
    } else {
        trace.push(res);
        Err(trace)
    }
}

/// Cumulants `(0, 1, c, c², …, c^{n-2})` of the shifted free Poisson law,
/// tagged with the closed form `R(w) = w/(1 − c w)`.
pub fn free_poisson_cumulants(c: f64, n: usize) -> Result<CumulantSequence<f64>> {
    if c < 0.0 || !c.is_finite() {
        return Err(Error::InvalidArgument(format!("free Poisson parameter must be >= 0, got {c}")));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("free Poisson cumulants need order >= 2".into()));
    }
    let form = RForm::Geometric(c);
    Ok(CumulantSequence { values: form.coefficients(n), generator: Some(form) })
}

/// Exact variant of [`free_poisson_cumulants`] for rational `c`.
pub fn free_poisson_cumulants_exact(
    c: &num_rational::BigRational,
    n: usize,
) -> CumulantSequence<num_rational::BigRational> {
    let mut values = vec![num_rational::BigRational::from_i64(0), num_rational::BigRational::from_i64(1)];
    while values.len() < n {
        let next = values[values.len() - 1].clone() * c.clone();
        values.push(next);
    }
    values.truncate(n);
    CumulantSequence::new(values)
}

/// A positive measure `μ` on `[−C, C]` with `∫|t| μ(dt) = 1`, the input of
/// the free Lévy–Khintchine representation `w_n = ∫ |t| t^{n−2} μ(dt)`.
#[derive(Clone, Debug)]
pub struct LevyData {
    pub atoms: Vec<(f64, f64)>,
    pub density: Option<ClosedDensity>,
    pub bound: f64,
}

/// Normalization tolerance for `∫|t| μ(dt) = 1`.
pub const LEVY_TOL: f64 = 1e-9;

impl LevyData {
    pub fn atomic(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let bound = atoms.iter().map(|a| a.0.abs()).fold(0.0, f64::max);
        LevyData { atoms, density: None, bound }.validated()
    }

    pub fn with_density(atoms: Vec<(f64, f64)>, density: ClosedDensity) -> Result<Self> {
        let bound = atoms
            .iter()
            .map(|a| a.0.abs())
            .fold(density.lo.abs().max(density.hi.abs()), f64::max);
        LevyData { atoms, density: Some(density), bound }.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.atoms.iter().any(|a| a.1 < 0.0) {
            return Err(Error::InvalidArgument("Lévy measure must be positive".into()));
        }
        let norm = self.abs_moment(0);
        if (norm - 1.0).abs() > LEVY_TOL {
            return Err(Error::InvalidArgument(format!(
                "∫|t| μ(dt) = {norm}, expected 1 within {LEVY_TOL}"
            )));
        }
        Ok(self)
    }

    /// `∫ |t| t^k μ(dt)`.
    fn abs_moment(&self, k: usize) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|&(t, m)| m * t.abs() * t.powi(k as i32)).sum();
        let dens = self.density.as_ref().map_or(0.0, |d| {
            crate::numeric::quadrature::EdgeMap::new(d.lo, d.hi)
                .integrate(&[0.0], |t| t.abs() * t.powi(k as i32) * d.eval(t))
        });
        atoms + dens
    }
}

/// Cumulants `w_1 = 0`, `w_k = ∫|t| t^{k−2} μ(dt)` (`k ≥ 2`). An atomic `μ`
/// also tags the sequence with its closed-form R-transform.
pub fn levy_khintchine_cumulants(l: &LevyData, n: usize) -> Result<CumulantSequence<f64>> {
    if n < 2 {
        return Err(Error::InvalidArgument("Lévy–Khintchine cumulants need order >= 2".into()));
    }
    let values = (1..=n).map(|k| if k == 1 { 0.0 } else { l.abs_moment(k - 2) }).collect();
    let generator = l.density.is_none().then(|| RForm::Levy(l.atoms.clone()));
    Ok(CumulantSequence { values, generator })
}

#[derive(Serialize, Deserialize)]
struct SeqRepr {
    exact: bool,
    values: Vec<serde_json::Value>,
}

impl<T: Scalar> Serialize for MomentSequence<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeqRepr { exact: T::EXACT, values: self.values.iter().map(Scalar::to_json).collect() }.serialize(s)
    }
}

impl<T: Scalar> Serialize for CumulantSequence<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeqRepr { exact: T::EXACT, values: self.values.iter().map(Scalar::to_json).collect() }.serialize(s)
    }
}

fn parse_values<'de, D: Deserializer<'de>, T: Scalar>(d: D) -> std::result::Result<Vec<T>, D::Error> {
    let repr = SeqRepr::deserialize(d)?;
    repr.values
        .iter()
        .map(|v| T::from_json(v).ok_or_else(|| D::Error::custom(format!("bad sequence entry {v}"))))
        .collect()
}

impl<'de, T: Scalar> Deserialize<'de> for MomentSequence<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        parse_values(d).map(MomentSequence::new)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for CumulantSequence<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        parse_values(d).map(CumulantSequence::new)
    }
}
