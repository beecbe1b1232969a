use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::partition::InterlacingCoords;
use crate::error::{Error, Result};
use crate::measure::{Density, GridDensity, Measure, SignedMeasure};
use crate::numeric::fmt_sig;
use crate::numeric::quadrature::EdgeMap;

/// Default number of grid samples for gridded profiles.
pub const DEFAULT_GRID: usize = 2048;
/// Mass tolerance for Rayleigh measures made only of atoms.
pub const EXACT_MASS_TOL: f64 = 1e-9;
/// Mass tolerance for Rayleigh measures with a gridded or quadrature density.
pub const GRID_MASS_TOL: f64 = 1e-4;
/// Fewer non-zero cells than this inside the support raises the
/// `accuracy_warning` flag of a finite-difference Rayleigh measure.
const MIN_RESOLVED_CELLS: usize = 64;

/// Uniform samples `values[k] = ω(u0 + k·du)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridProfile {
    pub u0: f64,
    pub du: f64,
    pub values: Vec<f64>,
}

impl GridProfile {
    fn end(&self) -> f64 {
        self.u0 + self.du * (self.values.len() - 1) as f64
    }
}

/// A continuous diagram `ω`: 1-Lipschitz, `ω(u) ≥ |u|`, and `ω(u) = |u|`
/// outside the represented range.
///
/// Both representations are linearly interpolated between their nodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContinuousDiagram {
    Breakpoints(Vec<(f64, f64)>),
    Grid(GridProfile),
}

impl ContinuousDiagram {
    /// The flat diagram `ω(u) = |u|`.
    pub fn flat() -> Self {
        ContinuousDiagram::Breakpoints(vec![(0.0, 0.0)])
    }

    /// Samples `f` at `n` equally spaced points of `[lo, hi]`.
    pub fn sample(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Self {
        assert!(n >= 2 && hi > lo, "need at least two samples on a non-empty interval");
        let du = (hi - lo) / (n - 1) as f64;
        let values = (0..n).map(|k| f(lo + du * k as f64)).collect();
        ContinuousDiagram::Grid(GridProfile { u0: lo, du, values })
    }

    /// Interpolation nodes, in increasing order.
    pub fn nodes(&self) -> Vec<f64> {
        match self {
            ContinuousDiagram::Breakpoints(b) => b.iter().map(|p| p.0).collect(),
            ContinuousDiagram::Grid(g) => {
                (0..g.values.len()).map(|k| g.u0 + g.du * k as f64).collect()
            }
        }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            ContinuousDiagram::Breakpoints(b) => {
                let (first, last) = (b[0], b[b.len() - 1]);
                if u <= first.0 || u >= last.0 {
                    return if u == first.0 {
                        first.1
                    } else if u == last.0 {
                        last.1
                    } else {
                        u.abs()
                    };
                }
                let k = b.partition_point(|p| p.0 <= u);
                let (a, c) = (b[k - 1], b[k]);
                a.1 + (c.1 - a.1) * (u - a.0) / (c.0 - a.0)
            }
            ContinuousDiagram::Grid(g) => {
                if u < g.u0 || u > g.end() {
                    return u.abs();
                }
                let t = (u - g.u0) / g.du;
                let k = (t.floor() as usize).min(g.values.len() - 2);
                let s = t - k as f64;
                g.values[k] * (1.0 - s) + g.values[k + 1] * s
            }
        }
    }

    /// Smallest `b` with `ω(u) = |u|` (within `tol`) for `|u| ≥ b`.
    pub fn support_bound(&self, tol: f64) -> f64 {
        self.nodes()
            .into_iter()
            .filter(|&u| (self.eval(u) - u.abs()).abs() > tol)
            .fold(0.0, |b: f64, u| b.max(u.abs()))
    }

    /// Checks the Lipschitz and `ω ≥ |u|` conditions at the nodes.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let nodes = with_zero(self.nodes());
        let values: Vec<f64> = nodes.iter().map(|&u| self.eval(u)).collect();
        for (k, (&u, &v)) in nodes.iter().zip(&values).enumerate() {
            if v < u.abs() - tol {
                return Err(Error::InvalidDiagram(format!("ω({u}) = {v} < |u|")));
            }
            if k > 0 {
                let slope = (v - values[k - 1]) / (u - nodes[k - 1]);
                if slope.abs() > 1.0 + tol {
                    return Err(Error::InvalidDiagram(format!(
                        "slope {slope} on [{}, {u}]",
                        nodes[k - 1]
                    )));
                }
            }
        }
        let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
        if (values[0] - first.abs()).abs() > tol || (values[values.len() - 1] - last.abs()).abs() > tol {
            return Err(Error::InvalidDiagram("profile does not meet |u| at its ends".into()));
        }
        Ok(())
    }

    /// `q^{-1/2} ω(q^{1/2} u)`.
    pub fn rescale(&self, q: u64) -> Self {
        assert!(q >= 1, "scale must be positive");
        let s = (q as f64).sqrt();
        match self {
            ContinuousDiagram::Breakpoints(b) => {
                ContinuousDiagram::Breakpoints(b.iter().map(|&(u, v)| (u / s, v / s)).collect())
            }
            ContinuousDiagram::Grid(g) => ContinuousDiagram::Grid(GridProfile {
                u0: g.u0 / s,
                du: g.du / s,
                values: g.values.iter().map(|v| v / s).collect(),
            }),
        }
    }

    /// Samples the profile on `n` points of `[-b-1, b+1]`, `b` the support bound.
    pub fn to_grid(&self, n: usize) -> Self {
        let b = self.support_bound(0.0);
        let f = |u| self.eval(u);
        ContinuousDiagram::sample(f, -b - 1.0, b + 1.0, n)
    }

    /// `∫ x^m (ω(x) − |x|) dx`, exact for the piecewise-linear interpolant.
    pub fn weighted_excess(&self, m: u32) -> f64 {
        let nodes = with_zero(self.nodes());
        let excess: Vec<f64> = nodes.iter().map(|&u| self.eval(u) - u.abs()).collect();
        let mut acc = 0.0;
        for k in 1..nodes.len() {
            let (a, b) = (nodes[k - 1], nodes[k]);
            let (fa, fb) = (excess[k - 1], excess[k]);
            let m1 = m as i32 + 1;
            let ia = (b.powi(m1) - a.powi(m1)) / m1 as f64;
            let ib = (b.powi(m1 + 1) - a.powi(m1 + 1)) / (m1 + 1) as f64;
            let s = (fb - fa) / (b - a);
            acc += fa * ia + s * (ib - a * ia);
        }
        acc
    }

    /// Half the area between `|u|` and the profile.
    pub fn area_second_moment(&self) -> f64 {
        0.5 * self.weighted_excess(0)
    }

    /// Power sums `p_k = ∫ x^k τ(dx)`, `k = 0..=n`, of the Rayleigh measure,
    /// via `τ = δ_0 + (ω − |x|)''/2` and integration by parts.
    pub fn rayleigh_power_sums(&self, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|k| {
                let base = if k == 0 { 1.0 } else { 0.0 };
                if k < 2 {
                    base
                } else {
                    0.5 * (k * (k - 1)) as f64 * self.weighted_excess(k as u32 - 2)
                }
            })
            .collect()
    }

    /// Two-column CSV `u,omega` at the nodes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,omega\n");
        for u in self.nodes() {
            out.push_str(&fmt_sig(u, 12));
            out.push(',');
            out.push_str(&fmt_sig(self.eval(u), 12));
            out.push('\n');
        }
        out
    }
}

fn with_zero(mut nodes: Vec<f64>) -> Vec<f64> {
    let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
    if first < 0.0 && last > 0.0 && !nodes.contains(&0.0) {
        let k = nodes.partition_point(|&u| u < 0.0);
        nodes.insert(k, 0.0);
    }
    nodes
}

/// Piecewise-linear profile `Σ|u − x_i| − Σ|u − y_j|` of interlacing
/// coordinates.
pub fn coords_to_profile(c: &InterlacingCoords) -> ContinuousDiagram {
    let mut nodes: Vec<i64> = c.minima().iter().chain(c.maxima()).copied().collect();
    nodes.sort_unstable();
    let points = nodes
        .into_iter()
        .map(|u| {
            let v: i64 = c.minima().iter().map(|x| (u - x).abs()).sum::<i64>()
                - c.maxima().iter().map(|y| (u - y).abs()).sum::<i64>();
            (u as f64, v as f64)
        })
        .collect();
    ContinuousDiagram::Breakpoints(points)
}

/// Rayleigh measure `τ = ω''/2`.
///
/// Piecewise-linear profiles give one atom per corner (`+1` at minima,
/// `−1` at maxima for partitions). Gridded profiles give a cell density
/// from centered second differences.
pub fn rayleigh_of_diagram(w: &ContinuousDiagram) -> SignedMeasure {
    match w {
        ContinuousDiagram::Breakpoints(b) => {
            let mut atoms = Vec::with_capacity(b.len());
            for k in 0..b.len() {
                let left = if k == 0 { -1.0 } else { (b[k].1 - b[k - 1].1) / (b[k].0 - b[k - 1].0) };
                let right = if k + 1 == b.len() {
                    1.0
                } else {
                    (b[k + 1].1 - b[k].1) / (b[k + 1].0 - b[k].0)
                };
                let weight = 0.5 * (right - left);
                if weight.abs() > 1e-12 {
                    atoms.push((b[k].0, weight));
                }
            }
            SignedMeasure::from_atoms(atoms)
        }
        ContinuousDiagram::Grid(g) => {
            let n = g.values.len();
            let u = |k: isize| g.u0 + g.du * k as f64;
            let value = |k: isize| {
                if k < 0 || k >= n as isize {
                    u(k).abs()
                } else {
                    g.values[k as usize]
                }
            };
            let values: Vec<f64> = (0..n as isize)
                .map(|k| (value(k + 1) - 2.0 * value(k) + value(k - 1)) / (2.0 * g.du * g.du))
                .collect();
            let resolved = values.iter().filter(|v| v.abs() > 1e-12).count();
            SignedMeasure {
                atoms: Vec::new(),
                density: Some(Density::Grid(GridDensity { u0: g.u0 - 0.5 * g.du, du: g.du, values })),
                accuracy_warning: resolved < MIN_RESOLVED_CELLS,
            }
        }
    }
}

/// Profile `ω(u) = ∫ |u − x| τ(dx)` of a Rayleigh measure, evaluated at
/// every atom and at the density's nodes: cell edges for a gridded
/// density, [`DEFAULT_GRID`] edge-clustered nodes for a closed form.
pub fn diagram_from_rayleigh(t: &SignedMeasure) -> Result<ContinuousDiagram> {
    diagram_from_rayleigh_with(t, DEFAULT_GRID)
}

pub fn diagram_from_rayleigh_with(t: &SignedMeasure, grid: usize) -> Result<ContinuousDiagram> {
    let tol = if t.density.is_some() { GRID_MASS_TOL } else { EXACT_MASS_TOL };
    let mass = t.total_mass();
    if (mass - 1.0).abs() > tol {
        return Err(Error::MassMismatch { mass, tolerance: tol });
    }
    let first = t.moment(1);
    if first.abs() > tol * (1.0 + t.moment(2).abs().sqrt()) {
        return Err(Error::InvalidDiagram(format!("Rayleigh measure not centered: first moment {first}")));
    }
    let mut nodes: Vec<f64> = t.atoms.iter().map(|a| a.0).collect();
    match &t.density {
        None => {}
        Some(Density::Grid(g)) => {
            nodes.extend((0..=g.values.len()).map(|k| g.u0 + g.du * k as f64));
        }
        Some(d @ Density::Closed(_)) => {
            // Nodes uniform in θ for x = mid + half·sin θ cluster at the
            // edges, where the profile behaves like a power 3/2.
            let (lo, hi) = d.support();
            let map = EdgeMap::new(lo, hi);
            let dt = PI / (grid - 1).max(1) as f64;
            nodes.extend((0..grid).map(|k| map.x(-FRAC_PI_2 + dt * k as f64)));
        }
    }
    if nodes.is_empty() {
        return Err(Error::InvalidDiagram("empty Rayleigh measure".into()));
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let points = nodes.into_iter().map(|u| (u, t.abs_moment_about(u))).collect();
    Ok(ContinuousDiagram::Breakpoints(points))
}

/// `sup_u |a(u) − b(u)|`, exact for the piecewise-linear interpolants.
pub fn sup_distance(a: &ContinuousDiagram, b: &ContinuousDiagram) -> f64 {
    let mut nodes = a.nodes();
    nodes.extend(b.nodes());
    nodes.push(0.0);
    nodes
        .into_iter()
        .map(|u| (a.eval(u) - b.eval(u)).abs())
        .fold(0.0, f64::max)
}

/// Half the area between `|u|` and `ω`; equals the second moment of the
/// transition measure.
pub fn area_second_moment(w: &ContinuousDiagram) -> f64 {
    w.area_second_moment()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::partition::{partition_to_coords, Partition};

    fn profile(s: &str) -> ContinuousDiagram {
        coords_to_profile(&partition_to_coords(&s.parse::<Partition>().unwrap()))
    }

    #[test]
    fn one_box_profile() {
        let w = profile("1");
        assert_eq!(w.eval(0.0), 2.0);
        assert_eq!(w.eval(1.0), 1.0);
        assert_eq!(w.eval(-1.0), 1.0);
        assert_eq!(w.eval(-3.5), 3.5);
        assert_eq!(w.eval(0.5), 1.5);
        w.validate(1e-12).unwrap();
    }

    #[test]
    fn empty_profile_is_flat() {
        let w = coords_to_profile(&partition_to_coords(&Partition::empty()));
        for u in [-2.0, -0.1, 0.0, 0.7, 3.0] {
            assert_eq!(w.eval(u), f64::abs(u));
        }
        let t = rayleigh_of_diagram(&w);
        assert_eq!(t.atoms, vec![(0.0, 1.0)]);
    }

    #[test]
    fn two_one_profile_matches_rayleigh_formula() {
        let w = profile("2,1");
        let tau = SignedMeasure::from_atoms(vec![(-2.0, 1.0), (0.0, 1.0), (2.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]);
        for k in -40..=40 {
            let u = k as f64 * 0.1;
            assert!((w.eval(u) - tau.abs_moment_about(u)).abs() < 1e-12);
        }
        assert_eq!(w.eval(0.0), 2.0);
        assert_eq!(w.eval(1.0), 3.0);
        assert_eq!(w.eval(-1.0), 3.0);
    }

    #[test]
    fn rayleigh_of_one_box() {
        let t = rayleigh_of_diagram(&profile("1"));
        assert_eq!(t.atoms, vec![(-1.0, 1.0), (0.0, -1.0), (1.0, 1.0)]);
    }

    #[test]
    fn from_rayleigh_examples() {
        let flat = diagram_from_rayleigh(&SignedMeasure::from_atoms(vec![(0.0, 1.0)])).unwrap();
        assert_eq!(sup_distance(&flat, &ContinuousDiagram::flat()), 0.0);
        let one = diagram_from_rayleigh(&SignedMeasure::from_atoms(vec![(-1.0, 1.0), (1.0, 1.0), (0.0, -1.0)]))
            .unwrap();
        assert_eq!(sup_distance(&one, &profile("1")), 0.0);
        let bad = SignedMeasure::from_atoms(vec![(0.0, 1.1)]);
        assert!(matches!(diagram_from_rayleigh(&bad), Err(Error::MassMismatch { .. })));
    }

    #[test]
    fn sup_distance_flat_to_one_box_by_dense_grid() {
        // oracle: dense evaluation of both closed forms
        let one_box = |u: f64| (u + 1.0).abs() + (u - 1.0).abs() - u.abs();
        let oracle = (-4000..=4000)
            .map(|k| k as f64 * 1e-3)
            .map(|u| (one_box(u) - u.abs()).abs())
            .fold(0.0, f64::max);
        let d = sup_distance(&ContinuousDiagram::flat(), &profile("1"));
        assert_eq!(d, oracle);
        assert_eq!(d, 2.0);
        assert_eq!(sup_distance(&profile("3,1"), &profile("3,1")), 0.0);
    }

    #[test]
    fn area_matches_size() {
        assert_eq!(area_second_moment(&ContinuousDiagram::flat()), 0.0);
        assert_eq!(area_second_moment(&profile("1")), 1.0);
        for q in 1..=10 {
            for lambda in Partition::all(q) {
                let w = coords_to_profile(&partition_to_coords(&lambda));
                assert_eq!(w.area_second_moment(), q as f64, "{lambda}");
                let r = w.rescale(q as u64);
                assert!((r.area_second_moment() - 1.0).abs() < 1e-12, "{lambda}");
            }
        }
    }

    #[test]
    fn rescaled_row_endpoints() {
        for q in [1u32, 4, 9, 10] {
            let w = profile(&q.to_string()).rescale(q as u64);
            let nodes = w.nodes();
            let s = (q as f64).sqrt();
            assert!((nodes[0] + 1.0 / s).abs() < 1e-12);
            assert!((nodes[nodes.len() - 1] - s).abs() < 1e-12);
        }
        assert_eq!(profile("1").rescale(1), profile("1"));
    }

    #[test]
    fn grid_rayleigh_mass_is_one() {
        let w = profile("3,2,2,1").to_grid(DEFAULT_GRID);
        let t = rayleigh_of_diagram(&w);
        assert!((t.total_mass() - 1.0).abs() < 1e-9);
        assert!(!t.accuracy_warning);
        let coarse = ContinuousDiagram::sample(|u| profile("1").eval(u), -2.0, 2.0, 9);
        assert!(rayleigh_of_diagram(&coarse).accuracy_warning);
    }

    #[test]
    fn power_sums_match_coords() {
        let lambda: Partition = "4,2,1".parse().unwrap();
        let c = partition_to_coords(&lambda);
        let exact = c.rayleigh_power_sums(6);
        let w = coords_to_profile(&c);
        let approx = w.rayleigh_power_sums(6);
        for (e, a) in exact.iter().zip(&approx) {
            assert!((*e as f64 - a).abs() < 1e-9, "{exact:?} vs {approx:?}");
        }
    }

    #[test]
    fn json_shapes() {
        let s = serde_json::to_string(&profile("1")).unwrap();
        assert_eq!(s, r#"{"breakpoints":[[-1.0,1.0],[0.0,2.0],[1.0,1.0]]}"#);
        let g = ContinuousDiagram::Grid(GridProfile { u0: -1.0, du: 1.0, values: vec![1.0, 2.0, 1.0] });
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"grid":{"u0":-1.0,"du":1.0,"values":[1.0,2.0,1.0]}}"#);
        let back: ContinuousDiagram = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
