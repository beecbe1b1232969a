//! Gauss–Legendre rules, composite and graded panel integration, and the
//! `x = mid + half·sin θ` substitution used for densities with square-root
//! or inverse-square-root edges.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul};
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrates `f` over `[a, b]` with a single application of the rule.
    pub fn integrate<T, F>(&self, a: f64, b: f64, f: F) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = T::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * (w * half);
        }
        acc
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached rule with `n` nodes.
pub fn rule(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
        .clone()
}

/// Nodes per panel in composite rules.
pub const PANEL_NODES: usize = 16;
/// Panels in the default composite rule (16 x 16 = 256 nodes).
pub const DEFAULT_PANELS: usize = 16;

/// Composite Gauss–Legendre over `panels` equal panels.
pub fn composite<T, F>(a: f64, b: f64, panels: usize, f: F) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    if b <= a {
        return T::default();
    }
    let gl = rule(PANEL_NODES);
    let h = (b - a) / panels as f64;
    let mut acc = T::default();
    for p in 0..panels {
        let lo = a + h * p as f64;
        acc = acc + gl.integrate(lo, lo + h, &f);
    }
    acc
}

/// Composite Gauss–Legendre with panels refined geometrically towards
/// `center`, down to a smallest panel width of `min_width`. Suitable for
/// integrands with a feature of width ~`min_width` at `center` (Lorentzian
/// peaks, kinks).
pub fn graded<T, F>(a: f64, b: f64, center: f64, min_width: f64, f: F) -> T
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    if b <= a {
        return T::default();
    }
    let c = center.clamp(a, b);
    let w = min_width.max((b - a) * 1e-14);
    let gl = rule(PANEL_NODES);
    let mut acc = T::default();
    // right side
    let mut lo = c;
    let mut width = w;
    while lo < b {
        let hi = (lo + width).min(b);
        if b - hi < width {
            acc = acc + gl.integrate(lo, b, &f);
            break;
        }
        acc = acc + gl.integrate(lo, hi, &f);
        lo = hi;
        width *= 2.0;
    }
    // left side
    let mut hi = c;
    let mut width = w;
    while hi > a {
        let lo = (hi - width).max(a);
        if lo - a < width {
            acc = acc + gl.integrate(a, hi, &f);
            break;
        }
        acc = acc + gl.integrate(lo, hi, &f);
        hi = lo;
        width *= 2.0;
    }
    acc
}

/// The substitution `x = mid + half·sin θ`, θ ∈ [-π/2, π/2], which turns
/// integrands with `(x-a)^{±1/2}` edge behaviour on `[a, b]` into smooth ones.
#[derive(Debug, Clone, Copy)]
pub struct EdgeMap {
    pub lo: f64,
    pub hi: f64,
}

impl EdgeMap {
    pub fn new(lo: f64, hi: f64) -> Self {
        EdgeMap { lo, hi }
    }

    fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn half(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn x(&self, theta: f64) -> f64 {
        self.mid() + self.half() * theta.sin()
    }

    pub fn jacobian(&self, theta: f64) -> f64 {
        self.half() * theta.cos()
    }

    pub fn theta(&self, x: f64) -> f64 {
        let s = ((x - self.mid()) / self.half()).clamp(-1.0, 1.0);
        s.asin()
    }

    /// ∫_lo^hi g(x) dx, with the integration split at the given points.
    pub fn integrate<T, F>(&self, splits: &[f64], g: F) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let mut cuts: Vec<f64> = vec![-FRAC_PI_2];
        for &s in splits {
            if s > self.lo && s < self.hi {
                cuts.push(self.theta(s));
            }
        }
        cuts.push(FRAC_PI_2);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let h = |t: f64| g(self.x(t)) * self.jacobian(t);
        let mut acc = T::default();
        for pair in cuts.windows(2) {
            let len = pair[1] - pair[0];
            let panels = ((len / PI) * DEFAULT_PANELS as f64).ceil().max(2.0) as usize;
            acc = acc + composite(pair[0], pair[1], panels, h);
        }
        acc
    }

    /// ∫_lo^hi g(x) dx where g has a sharp feature of width `width` at `center`.
    pub fn integrate_peaked<T, F>(&self, center: f64, width: f64, g: F) -> T
    where
        T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let c = center.clamp(self.lo, self.hi);
        let tc = self.theta(c);
        // dx/dθ at the center, bounded away from zero near the edges where
        // the map compresses distances quadratically.
        let dxdt = self.jacobian(tc).abs();
        let near_edge = (2.0 * width / self.half().max(1e-300)).sqrt();
        let theta_width = if dxdt > 0.0 {
            (width / dxdt).min(near_edge)
        } else {
            near_edge
        };
        let h = |t: f64| g(self.x(t)) * self.jacobian(t);
        graded(-FRAC_PI_2, FRAC_PI_2, tc, theta_width / 4.0, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // degree 15 is exact for 8 nodes
        let v: f64 = gl.integrate(0.0, 1.0, |x| x.powi(15));
        assert!((v - 1.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn large_rule_is_accurate() {
        let gl = GaussLegendre::new(256);
        let v: f64 = gl.integrate(0.0, PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn edge_map_handles_inverse_sqrt() {
        // ∫_{-2}^{2} dx / (π sqrt(4-x^2)) = 1
        let m = EdgeMap::new(-2.0, 2.0);
        let v: f64 = m.integrate(&[], |x| 1.0 / (PI * ((2.0 - x) * (2.0 + x)).sqrt()));
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn peaked_integration_resolves_lorentzian() {
        // semicircle Cauchy transform just above the axis
        let m = EdgeMap::new(-2.0, 2.0);
        let z = Complex64::new(0.3, 1e-3);
        let g: Complex64 = m.integrate_peaked(0.3, 1e-3, |x| {
            Complex64::new(((2.0 - x) * (2.0 + x)).sqrt() / (2.0 * PI), 0.0) / (z - x)
        });
        let exact = (z - (z * z - 4.0).sqrt()) / 2.0;
        // branch: pick root with Im G < 0
        let exact = if exact.im > 0.0 { (z + (z * z - 4.0).sqrt()) / 2.0 } else { exact };
        assert!((g - exact).norm() < 1e-9, "{g} vs {exact}");
    }
}
