//! Limit shapes `P_c` of Schur–Weyl measures with `√q/N → c`, their
//! Rayleigh and transition measures, and the general limit diagram attached
//! to a free cumulant sequence.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagram::{ContinuousDiagram, SignedMeasure, DEFAULT_GRID};
use crate::error::{Error, Result};
use crate::free_calculus::{cumulants_to_moments, k_transform_eval, CumulantSequence, RForm};
use crate::markov_krein::{markov_krein_inverse_with, stieltjes_invert, InversionOptions, KInverse};
use crate::measure::{ClosedDensity, CompactMeasure, Density};

/// Clamp tolerance for inverse trigonometric arguments.
const TRIG_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Zero,
    SubCritical,
    Critical,
    SuperCritical,
}

/// The limit `c = lim √q / N ∈ [0, ∞)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ScalingParam(f64);

impl ScalingParam {
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("scaling parameter must be finite and >= 0, got {c}")));
        }
        Ok(ScalingParam(c))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn regime(self) -> Regime {
        match self.0 {
            c if c == 0.0 => Regime::Zero,
            c if c < 1.0 => Regime::SubCritical,
            c if c == 1.0 => Regime::Critical,
            _ => Regime::SuperCritical,
        }
    }

    /// Support of the profile's non-flat part, `[min(c−2, −1/c), c+2]`.
    pub fn support(self) -> (f64, f64) {
        let c = self.0;
        match self.regime() {
            Regime::SuperCritical => (-1.0 / c, c + 2.0),
            _ => (c - 2.0, c + 2.0),
        }
    }
}

impl TryFrom<f64> for ScalingParam {
    type Error = Error;
    fn try_from(c: f64) -> Result<Self> {
        ScalingParam::new(c)
    }
}

impl From<ScalingParam> for f64 {
    fn from(c: ScalingParam) -> f64 {
        c.0
    }
}

impl fmt::Display for ScalingParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn clamp_unit(x: f64) -> f64 {
    debug_assert!(x.abs() <= 1.0 + 1e-6, "trig argument {x} far outside [-1, 1]");
    if x.abs() <= 1.0 + TRIG_TOL {
        x.clamp(-1.0, 1.0)
    } else {
        x.signum()
    }
}

/// `√(4 − (u − c)²)` in factored form.
fn edge_root(c: f64, u: f64) -> f64 {
    ((u - c + 2.0) * (c + 2.0 - u)).max(0.0).sqrt()
}

fn h(c: f64, u: f64) -> f64 {
    let s = (1.0 + u * c).sqrt();
    let a = clamp_unit((u + c) / (2.0 * s)).asin();
    let b = clamp_unit((2.0 + u * c - c * c) / (2.0 * s)).acos();
    (2.0 / PI) * (u * a + b / c + 0.5 * edge_root(c, u))
}

/// The limit shape `P_c(u)`.
pub fn p_c_profile(c: ScalingParam, u: f64) -> f64 {
    let cv = c.value();
    let inside = |lo: f64, hi: f64| lo < u && u < hi;
    match c.regime() {
        Regime::Zero => {
            if inside(-2.0, 2.0) {
                (2.0 / PI) * (u * clamp_unit(u / 2.0).asin() + edge_root(0.0, u))
            } else {
                u.abs()
            }
        }
        Regime::Critical => {
            if inside(-1.0, 3.0) {
                let v = u - 1.0;
                0.5 * (u + 1.0) + (1.0 / PI) * (v * clamp_unit(v / 2.0).asin() + edge_root(1.0, u))
            } else {
                u.abs()
            }
        }
        Regime::SubCritical => {
            if inside(cv - 2.0, cv + 2.0) {
                h(cv, u)
            } else {
                u.abs()
            }
        }
        Regime::SuperCritical => {
            if inside(-1.0 / cv, cv - 2.0) || u == cv - 2.0 {
                u + 2.0 / cv
            } else if inside(cv - 2.0, cv + 2.0) {
                h(cv, u)
            } else {
                u.abs()
            }
        }
    }
}

/// `P_c` on `n` equally spaced points of `[−c−3, c+3]`, plus the kinks
/// `c ± 2` and, for `c > 1`, `−1/c`, so interpolation is exact there.
pub fn p_c_diagram(c: ScalingParam, n: usize) -> ContinuousDiagram {
    assert!(n >= 2, "need at least two samples");
    let cv = c.value();
    let b = cv + 3.0;
    let du = 2.0 * b / (n - 1) as f64;
    let mut us: Vec<f64> = (0..n).map(|k| -b + du * k as f64).collect();
    us.extend([cv - 2.0, cv + 2.0]);
    if cv > 1.0 {
        us.push(-1.0 / cv);
    }
    us.sort_by(f64::total_cmp);
    us.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    ContinuousDiagram::Breakpoints(us.into_iter().map(|u| (u, p_c_profile(c, u))).collect())
}

/// `k(c, u) = (2 + cu − c²) / (2π (1 + cu) √(4 − (u − c)²))`.
fn k_density(c: f64, u: f64) -> f64 {
    (2.0 + c * u - c * c) / (2.0 * PI * (1.0 + c * u) * edge_root(c, u))
}

/// The Rayleigh measure `τ_c = P_c''/2`.
pub fn tau_c_measure(c: ScalingParam) -> SignedMeasure {
    let cv = c.value();
    let (lo, hi) = (cv - 2.0, cv + 2.0);
    match c.regime() {
        Regime::Critical => SignedMeasure::with_density(
            vec![(-1.0, 0.5)],
            Density::Closed(ClosedDensity::new(lo, hi, |u| 1.0 / (2.0 * PI * edge_root(1.0, u)))),
        ),
        Regime::SuperCritical => SignedMeasure::with_density(
            vec![(-1.0 / cv, 1.0)],
            Density::Closed(ClosedDensity::new(lo, hi, move |u| k_density(cv, u))),
        ),
        _ => SignedMeasure::with_density(
            vec![],
            Density::Closed(ClosedDensity::new(lo, hi, move |u| k_density(cv, u))),
        ),
    }
}

/// The transition measure of `P_c`: density `√(4 − (u−c)²) / (2π(1 + cu))`
/// on `[c−2, c+2]`, plus an atom of mass `1 − 1/c²` at `−1/c` when `c > 1`.
pub fn p_c_transition_measure(c: ScalingParam) -> CompactMeasure {
    let cv = c.value();
    let density = Density::Closed(ClosedDensity::new(cv - 2.0, cv + 2.0, move |u| {
        edge_root(cv, u) / (2.0 * PI * (1.0 + cv * u))
    }));
    let atoms = match c.regime() {
        Regime::SuperCritical => vec![(-1.0 / cv, 1.0 - 1.0 / (cv * cv))],
        _ => vec![],
    };
    CompactMeasure::with_density(atoms, density)
}

/// Closed-form Cauchy transform `G(z) = (z + c − √((z−c)² − 4)) / (2(1 + cz))`
/// of the transition measure of `P_c`, with the branch `G(z) ~ 1/z`.
pub fn p_c_cauchy(c: ScalingParam, z: Complex64) -> Complex64 {
    let cv = c.value();
    let s = (z - cv - 2.0).sqrt() * (z - cv + 2.0).sqrt();
    // equivalent form 2 / (z + c + s), stable for large |z|
    2.0 / (z + cv + s)
}

/// The limit diagram of a cumulant sequence `(0, 1, w_3, …)`, computed by
/// inverting `K(z) = 1/z + R(z)` for the Cauchy transform, Stieltjes
/// inversion for the transition measure, and inversion of `−G'/G` for the
/// Rayleigh measure and the profile. Failures carry the stage name.
pub fn limit_diagram_from_cumulants(w: &CumulantSequence<f64>) -> Result<ContinuousDiagram> {
    limit_pipeline(w, &InversionOptions::default()).map(|r| r.diagram)
}

/// Intermediate results of [`limit_diagram_from_cumulants`].
#[derive(Clone, Debug)]
pub struct LimitPipeline {
    pub window: (f64, f64),
    pub transition: CompactMeasure,
    pub diagram: ContinuousDiagram,
}

pub fn limit_pipeline(w: &CumulantSequence<f64>, opts: &InversionOptions) -> Result<LimitPipeline> {
    if w.order() < 2 || w.get(1).abs() > 1e-9 || (w.get(2) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("cumulants must start with w_1 = 0, w_2 = 1".into()));
    }
    let form: RForm = w.r_transform();
    let growth = form.growth();
    let probe = Complex64::new(0.0, 0.25 / growth.max(1.0));
    k_transform_eval(w, probe).map_err(|e| e.in_stage("k-transform"))?;

    let moments = cumulants_to_moments(w);
    let radius = 1.0
        + 1.5
            * (1..=moments.order())
                .map(|k| moments.get(k).abs().powf(1.0 / k as f64))
                .fold(0.0, f64::max);
    let window = (-radius, radius);
    let g = KInverse(&form);
    let transition = stieltjes_invert(&g, window, opts).map_err(|e| e.in_stage("transition"))?;
    let diagram = markov_krein_inverse_with(&g, window, opts).map_err(|e| e.in_stage("diagram"))?;
    Ok(LimitPipeline { window, transition, diagram })
}

/// `DEFAULT_GRID`-point rendering used by the CLI and golden files.
pub fn default_limit_grid(c: ScalingParam) -> ContinuousDiagram {
    let b = c.value() + 3.0;
    ContinuousDiagram::sample(|u| p_c_profile(c, u), -b, b, DEFAULT_GRID)
}
