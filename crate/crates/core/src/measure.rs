//! Compactly supported measures on the line: finitely many atoms plus an
//! optional density. Transition measures are [`CompactMeasure`]s (positive,
//! mass one); Rayleigh measures are [`SignedMeasure`]s.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numeric::quadrature::{EdgeMap, PANEL_NODES};
use crate::numeric::rational::{format_rational, parse_rational, to_f64};

/// Cells used when a closed-form density is written out as a grid.
pub const SERIALIZED_CELLS: usize = 2048;

/// Piecewise-constant density: `values[k]` is the average of the density
/// over the cell `[u0 + k·du, u0 + (k+1)·du]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    pub u0: f64,
    pub du: f64,
    pub values: Vec<f64>,
}

impl GridDensity {
    fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(k, &v)| {
            let l = self.u0 + self.du * k as f64;
            (l, l + self.du, v)
        })
    }

    /// Sum over cells of `avg · (F(r) − F(l))` for an antiderivative `F`.
    fn integrate_exact<T, F>(&self, antiderivative: F) -> T
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let mut acc = T::default();
        for (l, r, v) in self.cells() {
            if v != 0.0 {
                acc = acc + (antiderivative(r) - antiderivative(l)) * v;
            }
        }
        acc
    }
}

/// Density given by a closed-form expression on `[lo, hi]`. Integrals use
/// the `x = mid + half·sin θ` substitution, so square-root and
/// inverse-square-root behaviour at the edges is handled accurately.
#[derive(Clone)]
pub struct ClosedDensity {
    pub lo: f64,
    pub hi: f64,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ClosedDensity {
    pub fn new(lo: f64, hi: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ClosedDensity { lo, hi, f: Arc::new(f) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            0.0
        } else {
            (self.f)(x)
        }
    }

    fn map(&self) -> EdgeMap {
        EdgeMap::new(self.lo, self.hi)
    }

    /// Mass of the sub-interval `[l, r]` of the support.
    pub fn cell_mass(&self, l: f64, r: f64) -> f64 {
        let l = l.max(self.lo);
        let r = r.min(self.hi);
        if r <= l {
            return 0.0;
        }
        let m = self.map();
        let (tl, tr) = (m.theta(l), m.theta(r));
        let gl = crate::numeric::quadrature::rule(PANEL_NODES);
        gl.integrate(tl, tr, |t| (self.f)(m.x(t)) * m.jacobian(t))
    }
}

impl fmt::Debug for ClosedDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedDensity").field("lo", &self.lo).field("hi", &self.hi).finish()
    }
}

#[derive(Clone, Debug)]
pub enum Density {
    Grid(GridDensity),
    Closed(ClosedDensity),
}

impl Density {
    pub fn support(&self) -> (f64, f64) {
        match self {
            Density::Grid(g) => (g.u0, g.u0 + g.du * g.values.len() as f64),
            Density::Closed(c) => (c.lo, c.hi),
        }
    }

    pub fn mass(&self) -> f64 {
        self.moment(0)
    }

    /// `∫ x^k ρ(x) dx`.
    pub fn moment(&self, k: usize) -> f64 {
        match self {
            Density::Grid(g) => {
                g.integrate_exact(|x: f64| x.powi(k as i32 + 1) / (k as f64 + 1.0))
            }
            Density::Closed(c) => c.map().integrate(&[], |x| x.powi(k as i32) * (c.f)(x)),
        }
    }

    /// `∫ |u − x| ρ(x) dx`.
    pub fn abs_moment_about(&self, u: f64) -> f64 {
        match self {
            Density::Grid(g) => g
                .cells()
                .map(|(l, r, v)| {
                    let w = r - l;
                    let e = if u <= l {
                        w * (0.5 * (l + r) - u)
                    } else if u >= r {
                        w * (u - 0.5 * (l + r))
                    } else {
                        0.5 * ((u - l).powi(2) + (r - u).powi(2))
                    };
                    v * e
                })
                .sum(),
            Density::Closed(c) => c.map().integrate(&[u], |x| (u - x).abs() * (c.f)(x)),
        }
    }

    /// `∫ ρ(x) / (z − x) dx`.
    pub fn cauchy(&self, z: Complex64) -> Complex64 {
        match self {
            Density::Grid(g) => g.integrate_exact(|x: f64| -(z - x).ln()),
            Density::Closed(c) => {
                let m = c.map();
                let width = feature_width(c, z);
                let g = |x: f64| Complex64::new((c.f)(x), 0.0) / (z - x);
                if width > 0.25 * (c.hi - c.lo) {
                    m.integrate(&[], g)
                } else {
                    m.integrate_peaked(z.re, width, g)
                }
            }
        }
    }

    /// `d/dz ∫ ρ(x) / (z − x) dx = −∫ ρ(x) / (z − x)² dx`.
    pub fn cauchy_derivative(&self, z: Complex64) -> Complex64 {
        match self {
            Density::Grid(g) => g.integrate_exact(|x: f64| -(z - x).inv()),
            Density::Closed(c) => {
                let m = c.map();
                let width = feature_width(c, z);
                let g = |x: f64| -Complex64::new((c.f)(x), 0.0) / ((z - x) * (z - x));
                if width > 0.25 * (c.hi - c.lo) {
                    m.integrate(&[], g)
                } else {
                    m.integrate_peaked(z.re, width, g)
                }
            }
        }
    }

    /// Cell-average representation on `cells` equal cells over the support.
    pub fn to_grid(&self, cells: usize) -> GridDensity {
        match self {
            Density::Grid(g) => g.clone(),
            Density::Closed(c) => {
                let du = (c.hi - c.lo) / cells as f64;
                let values = (0..cells)
                    .map(|k| {
                        let l = c.lo + du * k as f64;
                        c.cell_mass(l, l + du) / du
                    })
                    .collect();
                GridDensity { u0: c.lo, du, values }
            }
        }
    }
}

fn feature_width(c: &ClosedDensity, z: Complex64) -> f64 {
    let outside = if z.re < c.lo {
        c.lo - z.re
    } else if z.re > c.hi {
        z.re - c.hi
    } else {
        0.0
    };
    z.im.abs().max(outside)
}

impl Serialize for Density {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_grid(SERIALIZED_CELLS).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Density {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        GridDensity::deserialize(d).map(Density::Grid)
    }
}

/// Integration against a measure made of atoms plus an optional density.
pub trait Measure {
    fn atoms(&self) -> &[(f64, f64)];
    fn density(&self) -> Option<&Density>;

    fn total_mass(&self) -> f64 {
        self.atoms().iter().map(|a| a.1).sum::<f64>() + self.density().map_or(0.0, Density::mass)
    }

    fn moment(&self, k: usize) -> f64 {
        self.atoms().iter().map(|&(x, w)| w * x.powi(k as i32)).sum::<f64>()
            + self.density().map_or(0.0, |d| d.moment(k))
    }

    /// Convex hull of atoms and density support, if non-empty.
    fn support_hull(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &(x, _) in self.atoms() {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if let Some(d) = self.density() {
            let (a, b) = d.support();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// Signed measure with finite support, e.g. the Rayleigh measure `ω''/2`
/// of a diagram.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SignedMeasure {
    pub atoms: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Density>,
    /// Set when a gridded input was too coarse for the finite-difference
    /// estimate to be trusted.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub accuracy_warning: bool,
}

impl SignedMeasure {
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Self {
        SignedMeasure { atoms, density: None, accuracy_warning: false }
    }

    pub fn with_density(atoms: Vec<(f64, f64)>, density: Density) -> Self {
        SignedMeasure { atoms, density: Some(density), accuracy_warning: false }
    }

    /// `∫ |u − x| τ(dx)`.
    pub fn abs_moment_about(&self, u: f64) -> f64 {
        self.atoms.iter().map(|&(x, w)| w * (u - x).abs()).sum::<f64>()
            + self.density.as_ref().map_or(0.0, |d| d.abs_moment_about(u))
    }
}

impl Measure for SignedMeasure {
    fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
    fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }
}

/// A compactly supported probability measure. Measures built from
/// partitions also carry their atoms as exact rationals.
#[derive(Clone, Debug, Default)]
pub struct CompactMeasure {
    pub atoms: Vec<(f64, f64)>,
    pub exact_atoms: Option<Vec<(BigRational, BigRational)>>,
    pub density: Option<Density>,
}

impl CompactMeasure {
    pub fn from_exact_atoms(exact: Vec<(BigRational, BigRational)>) -> Self {
        let atoms = exact.iter().map(|(x, w)| (to_f64(x), to_f64(w))).collect();
        CompactMeasure { atoms, exact_atoms: Some(exact), density: None }
    }

    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Self {
        CompactMeasure { atoms, exact_atoms: None, density: None }
    }

    pub fn with_density(atoms: Vec<(f64, f64)>, density: Density) -> Self {
        CompactMeasure { atoms, exact_atoms: None, density: Some(density) }
    }

    pub fn is_exact(&self) -> bool {
        self.exact_atoms.is_some() && self.density.is_none()
    }
}

impl Measure for CompactMeasure {
    fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
    fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }
}

impl Serialize for CompactMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CompactMeasure", 3)?;
        match &self.exact_atoms {
            Some(exact) => {
                let atoms: Vec<[String; 2]> =
                    exact.iter().map(|(x, w)| [format_rational(x), format_rational(w)]).collect();
                st.serialize_field("exact", &true)?;
                st.serialize_field("atoms", &atoms)?;
            }
            None => {
                st.serialize_field("exact", &false)?;
                st.serialize_field("atoms", &self.atoms)?;
            }
        }
        if let Some(d) = &self.density {
            st.serialize_field("density", d)?;
        }
        st.end()
    }
}

impl<'de> Deserialize<'de> for CompactMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            exact: bool,
            #[serde(default)]
            atoms: Vec<[serde_json::Value; 2]>,
            #[serde(default)]
            density: Option<GridDensity>,
        }
        let raw = Raw::deserialize(d)?;
        let density = raw.density.map(Density::Grid);
        if raw.exact {
            let exact = raw
                .atoms
                .iter()
                .map(|[x, w]| {
                    let p = |v: &serde_json::Value| {
                        let s = v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                        parse_rational(&s).map_err(D::Error::custom)
                    };
                    Ok((p(x)?, p(w)?))
                })
                .collect::<Result<Vec<_>, D::Error>>()?;
            let mut m = CompactMeasure::from_exact_atoms(exact);
            m.density = density;
            Ok(m)
        } else {
            let atoms = raw
                .atoms
                .iter()
                .map(|[x, w]| match (x.as_f64(), w.as_f64()) {
                    (Some(x), Some(w)) => Ok((x, w)),
                    _ => Err(D::Error::custom("atoms must be numbers")),
                })
                .collect::<Result<Vec<_>, D::Error>>()?;
            Ok(CompactMeasure { atoms, exact_atoms: None, density })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn semicircle() -> Density {
        Density::Closed(ClosedDensity::new(-2.0, 2.0, |x| {
            ((2.0 - x) * (2.0 + x)).sqrt() / (2.0 * PI)
        }))
    }

    #[test]
    fn semicircle_moments_are_catalan() {
        let d = semicircle();
        let m: Vec<f64> = (0..=6).map(|k| d.moment(k)).collect();
        for (got, want) in m.iter().zip([1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0]) {
            assert!((got - want).abs() < 1e-12, "{m:?}");
        }
    }

    #[test]
    fn grid_and_closed_agree_away_from_support() {
        let d = semicircle();
        let g = Density::Grid(d.to_grid(4096));
        assert!((g.mass() - 1.0).abs() < 1e-12);
        let z = Complex64::new(0.5, 0.7);
        assert!((d.cauchy(z) - g.cauchy(z)).norm() < 1e-6);
        assert!((d.cauchy_derivative(z) - g.cauchy_derivative(z)).norm() < 1e-5);
        assert!((d.abs_moment_about(0.3) - g.abs_moment_about(0.3)).abs() < 1e-6);
    }

    #[test]
    fn exact_measure_round_trips_through_json() {
        use crate::numeric::rational::rat;
        let m = CompactMeasure::from_exact_atoms(vec![(rat(-1, 1), rat(1, 2)), (rat(1, 1), rat(1, 2))]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"exact":true,"atoms":[["-1","1/2"],["1","1/2"]]}"#);
        let back: CompactMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back.exact_atoms, m.exact_atoms);
    }
}
