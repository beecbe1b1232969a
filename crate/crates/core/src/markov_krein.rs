//! The correspondence between continuous diagrams and probability measures:
//! transition measures of partitions, Cauchy transforms and moments,
//! numerical Stieltjes inversion, and the inverse map from a measure back
//! to its diagram through `−∂_z log G(z) = ∫ τ(du)/(z − u)`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::diagram::{diagram_from_rayleigh_with, DEFAULT_GRID, ContinuousDiagram, InterlacingCoords, SignedMeasure};
use crate::error::{Error, Result};
use crate::free_calculus::{invert_k, KFunction, MomentSequence};
use crate::measure::{CompactMeasure, Density, GridDensity, Measure};
use crate::numeric::quadrature::rule;
use crate::numeric::Scalar;

/// Default ε ladder for Stieltjes inversion.
pub const DEFAULT_SCHEDULE: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
/// Extrapolated atom masses at or below this are treated as density.
pub const ATOM_THRESHOLD: f64 = 1e-3;
/// Allowed deviation of the recovered total mass from 1.
pub const INVERSION_MASS_TOL: f64 = 1e-4;

/// Atoms `(x_k, μ_k)` with `μ_k = ∏_j (x_k − y_j) / ∏_{i≠k} (x_k − x_i)`,
/// the partial-fraction coefficients of `∏(z − y_j) / ∏(z − x_i)`.
pub fn transition_of_coords(c: &InterlacingCoords) -> CompactMeasure {
    let xs = c.minima();
    let ys = c.maxima();
    let atoms = xs
        .iter()
        .enumerate()
        .map(|(k, &xk)| {
            let num = ys.iter().fold(BigInt::one(), |acc, &y| acc * BigInt::from(xk - y));
            let den = xs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .fold(BigInt::one(), |acc, (_, &x)| acc * BigInt::from(xk - x));
            (BigRational::from_integer(xk.into()), BigRational::new(num, den))
        })
        .collect();
    CompactMeasure::from_exact_atoms(atoms)
}

/// Moments `m_1..m_n` of the transition measure of interlacing
/// coordinates, from the Rayleigh power sums `p_k = Σx_i^k − Σy_j^k` via
/// `n·m_n = Σ_{k=1}^{n} p_k m_{n−k}`.
pub fn coords_moments(c: &InterlacingCoords, n: usize) -> MomentSequence<BigRational> {
    let p: Vec<BigRational> = c
        .rayleigh_power_sums(n)
        .into_iter()
        .map(|v| BigRational::from_integer(v.into()))
        .collect();
    MomentSequence::new(newton_moments(&p, n))
}

/// Moments of the transition measure of a continuous diagram, by the same
/// recursion on the Rayleigh power sums of `ω`.
pub fn diagram_moments(w: &ContinuousDiagram, n: usize) -> MomentSequence<f64> {
    MomentSequence::new(newton_moments(&w.rayleigh_power_sums(n), n))
}

fn newton_moments<T: Scalar>(p: &[T], n: usize) -> Vec<T> {
    let mut m = vec![T::one()];
    for k in 1..=n {
        let mut acc = T::zero();
        for j in 1..=k {
            acc = acc + p[j].clone() * m[k - j].clone();
        }
        m.push(acc / T::from_i64(k as i64));
    }
    m.split_off(1)
}

/// `G(z) = ∫ m(dx) / (z − x)`.
///
/// Real `z` inside the convex hull of the support is rejected with
/// [`Error::Pole`].
pub fn cauchy_transform(m: &CompactMeasure, z: Complex64) -> Result<Complex64> {
    check_off_support(m, z)?;
    Ok(cauchy_unchecked(m, z))
}

/// `G'(z) = −∫ m(dx) / (z − x)²`.
pub fn cauchy_transform_derivative(m: &CompactMeasure, z: Complex64) -> Result<Complex64> {
    check_off_support(m, z)?;
    let atoms: Complex64 = m.atoms.iter().map(|&(x, w)| -w / ((z - x) * (z - x))).sum();
    Ok(atoms + m.density.as_ref().map_or(Complex64::zero(), |d| d.cauchy_derivative(z)))
}

fn cauchy_unchecked(m: &CompactMeasure, z: Complex64) -> Complex64 {
    let atoms: Complex64 = m.atoms.iter().map(|&(x, w)| w / (z - x)).sum();
    atoms + m.density.as_ref().map_or(Complex64::zero(), |d| d.cauchy(z))
}

fn check_off_support(m: &CompactMeasure, z: Complex64) -> Result<()> {
    if z.im == 0.0 {
        let on_atom = m.atoms.iter().any(|a| a.0 == z.re);
        let in_density = m.density.as_ref().is_some_and(|d| {
            let (lo, hi) = d.support();
            lo <= z.re && z.re <= hi
        });
        if on_atom || in_density {
            return Err(Error::Pole(z.re));
        }
    }
    Ok(())
}

/// Floating-point moments `m_1..m_n`.
pub fn moments_of_measure(m: &CompactMeasure, n: usize) -> MomentSequence<f64> {
    match exact_moments_of_measure(m, n) {
        Some(exact) => exact.to_f64(),
        None => MomentSequence::new((1..=n).map(|k| m.moment(k)).collect()),
    }
}

/// Exact moments, available when the measure is purely atomic with
/// rational atoms.
pub fn exact_moments_of_measure(m: &CompactMeasure, n: usize) -> Option<MomentSequence<BigRational>> {
    if !m.is_exact() {
        return None;
    }
    let atoms = m.exact_atoms.as_ref()?;
    let values = (1..=n)
        .map(|k| {
            atoms
                .iter()
                .fold(BigRational::zero(), |acc, (x, w)| acc + w * num_traits::pow(x.clone(), k))
        })
        .collect();
    Some(MomentSequence::new(values))
}

/// A function analytic in the upper half-plane that is to be inverted,
/// usually a Cauchy transform.
pub trait CauchyTransform: Sync {
    fn eval(&self, z: Complex64) -> Result<Complex64>;

    /// Derivative; by default from Cauchy's integral formula on a circle of
    /// radius `Im z / 2`, which stays inside the half-plane of analyticity.
    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        const POINTS: usize = 32;
        let r = 0.5 * z.im.abs();
        let mut acc = Complex64::zero();
        for k in 0..POINTS {
            let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / POINTS as f64);
            acc += self.eval(z + e * r)? * e.conj();
        }
        Ok(acc / (POINTS as f64 * r))
    }
}

impl CauchyTransform for CompactMeasure {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        cauchy_transform(self, z)
    }
    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        cauchy_transform_derivative(self, z)
    }
}

/// A Cauchy transform given as a closure.
pub struct CauchyFn<F>(pub F);

impl<F: Fn(Complex64) -> Complex64 + Sync> CauchyTransform for CauchyFn<F> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok((self.0)(z))
    }
}

/// The Cauchy transform `G = K^{-1}` of a K-function, evaluated by
/// [`invert_k`]; `G' = 1 / K'(G)`.
pub struct KInverse<'a>(pub &'a dyn KFunction);

impl CauchyTransform for KInverse<'_> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        invert_k(self.0, z)
    }
    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let g = invert_k(self.0, z)?;
        Ok(self.0.dk(g).inv())
    }
}

/// `H(z) = −G'(z) / G(z)`, the Cauchy transform of the Rayleigh measure.
pub struct LogDerivative<'a>(pub &'a dyn CauchyTransform);

impl CauchyTransform for LogDerivative<'_> {
    fn eval(&self, z: Complex64) -> Result<Complex64> {
        let g = self.0.eval(z)?;
        if g.norm() == 0.0 {
            return Err(Error::numerical("log-derivative", format!("G vanishes at {z}")));
        }
        Ok(-self.0.derivative(z)? / g)
    }
}

/// Parameters of the numerical Stieltjes inversion.
#[derive(Clone, Debug)]
pub struct InversionOptions {
    /// Decreasing distances from the real axis; the limit `ε → 0` is taken
    /// by polynomial extrapolation through all of them.
    pub schedule: Vec<f64>,
    pub atom_threshold: f64,
    pub mass_tol: f64,
    /// Number of density cells; by default the cell width is at most the
    /// smallest ε over two.
    pub cells: Option<usize>,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            schedule: DEFAULT_SCHEDULE.to_vec(),
            atom_threshold: ATOM_THRESHOLD,
            mass_tol: INVERSION_MASS_TOL,
            cells: None,
        }
    }
}

/// Result of inverting a Cauchy transform over a window.
#[derive(Clone, Debug)]
pub struct Inversion {
    pub atoms: Vec<(f64, f64)>,
    pub density: GridDensity,
    /// Recovered total mass at each ε of the schedule.
    pub mass_by_eps: Vec<f64>,
    /// Extrapolated total mass.
    pub mass: f64,
}

/// Weights `w_i` with `Σ w_i f(ε_i) = f(0)` exactly for polynomials of
/// degree `< len` (Lagrange interpolation evaluated at 0).
fn extrapolation_weights(eps: &[f64]) -> Vec<f64> {
    (0..eps.len())
        .map(|i| {
            (0..eps.len())
                .filter(|&j| j != i)
                .map(|j| eps[j] / (eps[j] - eps[i]))
                .product()
        })
        .collect()
}

/// Recovers a (possibly signed) measure from its Cauchy transform on
/// `window`: atoms where `iε F(u + iε)` converges to a non-zero limit, and
/// cell masses `−(1/π) ∫_cell Im F_rest(x + iε) dx` of the remainder, both
/// extrapolated to `ε = 0`.
pub fn invert(f: &dyn CauchyTransform, window: (f64, f64), opts: &InversionOptions) -> Result<Inversion> {
    let (lo, hi) = window;
    let eps = &opts.schedule;
    if !(hi > lo) || eps.is_empty() || eps.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(format!("bad window {window:?} or schedule {eps:?}")));
    }
    let weights = extrapolation_weights(eps);
    let e_min = eps.iter().copied().fold(f64::INFINITY, f64::min);
    let atoms = find_atoms(f, lo, hi, e_min, eps, &weights, opts.atom_threshold)?;

    let cells = opts.cells.unwrap_or((2.0 * (hi - lo) / e_min).ceil() as usize).max(16);
    let du = (hi - lo) / cells as f64;
    let gl = rule(8);
    let rest = |z: Complex64| -> Result<Complex64> {
        let pole: Complex64 = atoms.iter().map(|&(a, w)| w / (z - a)).sum();
        Ok(f.eval(z)? - pole)
    };
    // masses[k][i]: mass of cell k at ε_i
    let masses: Vec<Vec<f64>> = (0..cells)
        .into_par_iter()
        .map(|k| {
            let l = lo + du * k as f64;
            eps.iter()
                .map(|&e| {
                    let mut acc = 0.0;
                    for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                        let u = l + 0.5 * du * (1.0 + x);
                        acc += w * rest(Complex64::new(u, e))?.im;
                    }
                    Ok(-acc * 0.5 * du / PI)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_stage("stieltjes"))?;

    let atom_mass: f64 = atoms.iter().map(|a| a.1).sum();
    let mass_by_eps: Vec<f64> =
        (0..eps.len()).map(|i| atom_mass + masses.iter().map(|m| m[i]).sum::<f64>()).collect();
    let values: Vec<f64> = masses
        .iter()
        .map(|m| m.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>() / du)
        .collect();
    let mass = atom_mass + values.iter().sum::<f64>() * du;
    Ok(Inversion { atoms, density: GridDensity { u0: lo, du, values }, mass_by_eps, mass })
}

fn find_atoms(
    f: &dyn CauchyTransform,
    lo: f64,
    hi: f64,
    e_min: f64,
    eps: &[f64],
    weights: &[f64],
    threshold: f64,
) -> Result<Vec<(f64, f64)>> {
    // iε F(u + iε) tends to the atom mass at u and to 0 elsewhere.
    let probe = |u: f64, e: f64| -> Result<f64> { Ok((Complex64::new(0.0, e) * f.eval(Complex64::new(u, e))?).re) };
    let h = 0.5 * e_min;
    let n = ((hi - lo) / h).ceil() as usize + 1;
    let scan: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| probe(lo + h * k as f64, e_min).map(f64::abs))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_stage("atom-scan"))?;
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    for k in 1..n.saturating_sub(1) {
        if !(scan[k] > 0.5 * threshold && scan[k] >= scan[k - 1] && scan[k] > scan[k + 1]) {
            continue;
        }
        let u0 = lo + h * k as f64;
        let golden = golden_max(|u| probe(u, e_min).map(f64::abs).unwrap_or(0.0), u0 - h, u0 + h);
        let a = pole_location(f, golden, e_min).unwrap_or(golden);
        let vals = eps.iter().map(|&e| probe(a, e)).collect::<Result<Vec<_>>>()?;
        let mass: f64 = vals.iter().zip(weights).map(|(v, w)| v * w).sum();
        let last = vals[vals.len() - 1];
        let prev = if vals.len() > 1 { vals[vals.len() - 2] } else { last };
        // √ε edge artifacts keep drifting between successive ε.
        let converged = (last - prev).abs() <= 0.1 * last.abs();
        if mass.abs() > threshold && converged && !atoms.iter().any(|b| (b.0 - a).abs() < 2.0 * e_min) {
            atoms.push((a, mass));
        }
    }
    Ok(atoms)
}

fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..60 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Locates a real pole of `F` near `u` as a zero of `1/F` by the secant
/// method, which converges when `F` is meromorphic there. Returns `None`
/// when the iteration leaves the neighbourhood or does not settle.
fn pole_location(f: &dyn CauchyTransform, u: f64, e: f64) -> Option<f64> {
    let floor = 1e-13;
    let phi = |z: Complex64| -> Option<Complex64> {
        let z = Complex64::new(z.re, z.im.max(floor));
        let v = f.eval(z).ok()?;
        (v.norm() > 0.0).then(|| v.inv())
    };
    let mut z0 = Complex64::new(u, e);
    let mut z1 = Complex64::new(u, 0.5 * e);
    let mut p0 = phi(z0)?;
    let mut p1 = phi(z1)?;
    for _ in 0..60 {
        let dp = p1 - p0;
        if dp.norm() == 0.0 {
            break;
        }
        let z2 = z1 - p1 * (z1 - z0) / dp;
        if !(z2.re.is_finite() && z2.im.is_finite()) || (z2.re - u).abs() > 2.0 * e {
            return None;
        }
        let z2 = Complex64::new(z2.re, z2.im.max(floor));
        if (z2 - z1).norm() < 1e-14 * (1.0 + u.abs()) {
            z1 = z2;
            break;
        }
        z0 = z1;
        p0 = p1;
        z1 = z2;
        p1 = phi(z1)?;
    }
    (z1.im < 1e-8 && (z1.re - u).abs() < 2.0 * e).then_some(z1.re)
}

/// Stieltjes inversion of a Cauchy transform of a probability measure:
/// `ρ(u) = −(1/π) lim Im G(u + iε)` and atoms `lim iε G(a + iε)`.
///
/// Fails when the recovered mass differs from 1 by more than
/// `opts.mass_tol`, reporting the mass at each ε.
pub fn stieltjes_invert(g: &dyn CauchyTransform, window: (f64, f64), opts: &InversionOptions) -> Result<CompactMeasure> {
    let inv = invert(g, window, opts)?;
    check_mass(&inv, opts.mass_tol, "stieltjes")?;
    let mut m = CompactMeasure::with_density(inv.atoms, Density::Grid(inv.density));
    m.atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(m)
}

fn check_mass(inv: &Inversion, tol: f64, stage: &str) -> Result<()> {
    if (inv.mass - 1.0).abs() > tol {
        return Err(Error::numerical(
            stage,
            format!(
                "extrapolated mass {} differs from 1 by more than {tol}; mass at each ε: {:?}",
                inv.mass, inv.mass_by_eps
            ),
        ));
    }
    Ok(())
}

/// Default inversion window: the support hull widened by 1 on each side.
pub fn default_window(m: &CompactMeasure) -> (f64, f64) {
    let (lo, hi) = m.support_hull().unwrap_or((0.0, 0.0));
    (lo - 1.0, hi + 1.0)
}

/// The diagram whose transition measure is `m`.
pub fn markov_krein_inverse(m: &CompactMeasure) -> Result<ContinuousDiagram> {
    markov_krein_inverse_with(m, default_window(m), &InversionOptions::default())
}

/// The diagram whose transition measure has Cauchy transform `g`. The
/// Rayleigh measure is recovered by inverting `−G'/G` over `window`, which
/// must contain the support.
pub fn markov_krein_inverse_with(
    g: &dyn CauchyTransform,
    window: (f64, f64),
    opts: &InversionOptions,
) -> Result<ContinuousDiagram> {
    let h = LogDerivative(g);
    let inv = invert(&h, window, opts).map_err(|e| e.in_stage("rayleigh"))?;
    check_mass(&inv, opts.mass_tol, "rayleigh")?;
    let tau = SignedMeasure::with_density(inv.atoms, Density::Grid(inv.density));
    diagram_from_rayleigh_with(&tau, DEFAULT_GRID).map_err(|e| e.in_stage("profile"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{coords_to_profile, partition_to_coords, sup_distance, Partition};
    use crate::free_calculus::{cumulants_to_moments, free_poisson_cumulants_exact, RForm};
    use crate::measure::ClosedDensity;
    use crate::numeric::rational::{int, rat};
    use proptest::prelude::*;

    fn transition(s: &str) -> CompactMeasure {
        transition_of_coords(&partition_to_coords(&s.parse::<Partition>().unwrap()))
    }

    fn exact_atoms(m: &CompactMeasure) -> Vec<(BigRational, BigRational)> {
        m.exact_atoms.clone().unwrap()
    }

    /// Mass of the atom at `x` by numerically integrating `∏(z−y)/∏(z−x)`
    /// around a small circle: the residue.
    fn residue_oracle(c: &InterlacingCoords, x: f64) -> f64 {
        let f = |z: Complex64| {
            let num: Complex64 = c.maxima().iter().map(|&y| z - y as f64).product();
            let den: Complex64 = c.minima().iter().map(|&x| z - x as f64).product();
            num / den
        };
        let n = 64;
        let r = 0.25;
        let mut acc = Complex64::zero();
        for k in 0..n {
            let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            acc += f(x + e * r) * e * r;
        }
        (acc / n as f64).re
    }

    #[test]
    fn transition_examples() {
        assert_eq!(exact_atoms(&transition("1")), vec![(int(-1), rat(1, 2)), (int(1), rat(1, 2))]);
        assert_eq!(exact_atoms(&transition("2")), vec![(int(-1), rat(2, 3)), (int(2), rat(1, 3))]);
        assert_eq!(
            exact_atoms(&transition("2,1")),
            vec![(int(-2), rat(3, 8)), (int(0), rat(1, 4)), (int(2), rat(3, 8))]
        );
        for s in ["1", "2", "2,1", "3,1,1", "4,4,2"] {
            let c = partition_to_coords(&s.parse().unwrap());
            for (x, w) in transition_of_coords(&c).atoms {
                assert!((residue_oracle(&c, x) - w).abs() < 1e-12, "{s} at {x}");
            }
        }
    }

    #[test]
    fn transition_invariants_exhaustive() {
        for q in 1..=10 {
            for lambda in Partition::all(q) {
                let c = partition_to_coords(&lambda);
                let atoms = exact_atoms(&transition_of_coords(&c));
                assert!(atoms.iter().all(|(_, w)| *w > BigRational::zero()), "{lambda}");
                let m = exact_moments_of_measure(&transition_of_coords(&c), 4).unwrap();
                assert_eq!(atoms.iter().map(|a| a.1.clone()).sum::<BigRational>(), int(1));
                assert_eq!(m.get(1), int(0));
                assert_eq!(m.get(2), int(q as i64));
                assert_eq!(coords_moments(&c, 4), m, "{lambda}");
            }
        }
    }

    #[test]
    fn cauchy_examples() {
        let delta = CompactMeasure::from_atoms(vec![(0.0, 1.0)]);
        let z = Complex64::new(0.3, -0.7);
        assert!((cauchy_transform(&delta, z).unwrap() - z.inv()).norm() < 1e-15);
        let two = transition("1");
        let v = cauchy_transform(&two, Complex64::new(2.0, 0.0)).unwrap();
        assert!((v.re - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(cauchy_transform(&two, Complex64::new(1.0, 0.0)), Err(Error::Pole(1.0)));
        let semi = CompactMeasure::with_density(
            vec![],
            Density::Closed(ClosedDensity::new(-2.0, 2.0, |x| ((2.0 - x) * (2.0 + x)).sqrt() / (2.0 * PI))),
        );
        let g = cauchy_transform(&semi, Complex64::new(0.0, 2.0)).unwrap();
        assert!((g - Complex64::new(0.0, 1.0 - 2f64.sqrt())).norm() < 1e-12);
        assert!(cauchy_transform(&semi, Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn moments_examples() {
        let m = moments_of_measure(&transition("1"), 4);
        assert_eq!(m.values, vec![0.0, 1.0, 0.0, 1.0]);
        assert_eq!(exact_moments_of_measure(&transition("2,1"), 2).unwrap().values, vec![int(0), int(3)]);
    }

    #[test]
    fn default_derivative_matches_analytic() {
        let m = transition("3,1");
        let z = Complex64::new(0.4, 0.3);
        let numeric = CauchyFn(|z| cauchy_unchecked(&m, z)).derivative(z).unwrap();
        let exact = cauchy_transform_derivative(&m, z).unwrap();
        assert!((numeric - exact).norm() < 1e-8 * exact.norm(), "{numeric} {exact}");
    }

    #[test]
    fn invert_single_atom() {
        let a = 0.37;
        let g = CauchyFn(move |z: Complex64| (z - a).inv());
        let m = stieltjes_invert(&g, (-1.0, 1.5), &InversionOptions::default()).unwrap();
        assert_eq!(m.atoms.len(), 1);
        assert!((m.atoms[0].0 - a).abs() < 1e-12 && (m.atoms[0].1 - 1.0).abs() < 1e-12);
        assert!(m.density.unwrap().mass().abs() < 1e-10);
    }

    #[test]
    fn invert_semicircle() {
        let g = CauchyFn(|z: Complex64| {
            let s = (z - 2.0).sqrt() * (z + 2.0).sqrt();
            (z - s) / 2.0
        });
        let m = stieltjes_invert(&g, (-3.0, 3.0), &InversionOptions::default()).unwrap();
        assert!(m.atoms.is_empty(), "{:?}", m.atoms);
        let d = m.density.as_ref().unwrap();
        // cell averages against the exact cell masses
        let exact = ClosedDensity::new(-2.0, 2.0, |x| ((2.0 - x) * (2.0 + x)).sqrt() / (2.0 * PI));
        if let Density::Grid(grid) = d {
            let err = grid
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    let l = grid.u0 + grid.du * k as f64;
                    (v - exact.cell_mass(l, l + grid.du) / grid.du).abs()
                })
                .fold(0.0, f64::max);
            assert!(err < 1e-2, "max cell error {err}");
        }
        let mom = moments_of_measure(&m, 6).values;
        for (a, b) in mom.iter().zip([0.0, 1.0, 0.0, 2.0, 0.0, 5.0]) {
            assert!((a - b).abs() < 1e-5, "{mom:?}");
        }
    }

    fn free_poisson_g(c: f64) -> impl Fn(Complex64) -> Complex64 + Sync {
        move |z: Complex64| {
            let s = (z - c - 2.0).sqrt() * (z - c + 2.0).sqrt();
            (z + c - s) / (2.0 * (1.0 + c * z))
        }
    }

    #[test]
    fn invert_free_poisson_with_atom() {
        let g = CauchyFn(free_poisson_g(2.0));
        let m = stieltjes_invert(&g, (-1.5, 5.0), &InversionOptions::default()).unwrap();
        assert_eq!(m.atoms.len(), 1, "{:?}", m.atoms);
        assert!((m.atoms[0].0 + 0.5).abs() < 1e-9 && (m.atoms[0].1 - 0.75).abs() < 1e-6, "{:?}", m.atoms);
        // moments from the Laurent expansion of G, i.e. from the cumulants
        let expected = cumulants_to_moments(&free_poisson_cumulants_exact(&int(2), 6)).to_f64();
        let mom = moments_of_measure(&m, 6);
        for k in 1..=6 {
            assert!((mom.get(k) - expected.get(k)).abs() < 1e-5 * (1.0 + expected.get(k).abs()), "m_{k}");
        }
    }

    #[test]
    fn inversion_reports_mass_defect() {
        // window misses half of the measure
        let g = CauchyFn(|z: Complex64| 0.5 / (z - 3.0) + 0.5 / (z + 3.0));
        match stieltjes_invert(&g, (-1.0, 5.0), &InversionOptions::default()) {
            Err(Error::Numerical { stage, message }) => {
                assert_eq!(stage, "stieltjes");
                assert!(message.contains("mass at each"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inverse_of_partitions_reproduces_profiles() {
        for q in 1..=6 {
            for lambda in Partition::all(q) {
                let c = partition_to_coords(&lambda);
                let w = markov_krein_inverse(&transition_of_coords(&c)).unwrap();
                let d = sup_distance(&w, &coords_to_profile(&c));
                assert!(d < 1e-4, "{lambda}: {d}");
            }
        }
    }

    #[test]
    fn inverse_through_k_transform() {
        let form = RForm::Series(vec![0.0, 1.0]);
        let g = KInverse(&form);
        let w = markov_krein_inverse_with(&g, (-3.0, 3.0), &InversionOptions::default()).unwrap();
        let p0 = |u: f64| {
            if u.abs() >= 2.0 {
                u.abs()
            } else {
                (2.0 / PI) * (u * (u / 2.0).asin() + (4.0 - u * u).sqrt())
            }
        };
        let err = w.nodes().into_iter().map(|u| (w.eval(u) - p0(u)).abs()).fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
    }

    proptest! {
        #[test]
        fn herglotz(
            atoms in proptest::collection::vec((-5.0f64..5.0, 0.01f64..1.0), 1..6),
            x in -10.0f64..10.0,
            y in 1e-6f64..10.0,
        ) {
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            let m = CompactMeasure::from_atoms(atoms.iter().map(|&(a, w)| (a, w / total)).collect());
            let g = cauchy_transform(&m, Complex64::new(x, y)).unwrap();
            prop_assert!(g.im < 0.0);
        }

        #[test]
        fn moments_agree_with_power_sum_route(parts in proptest::collection::vec(1u32..6, 1..5)) {
            let mut parts = parts;
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let c = partition_to_coords(&Partition::new(parts).unwrap());
            let direct = exact_moments_of_measure(&transition_of_coords(&c), 7).unwrap();
            prop_assert_eq!(coords_moments(&c, 7), direct);
        }
    }
}
