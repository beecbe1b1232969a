//! End-to-end acceptance checks. Each criterion reports PASS or FAIL with
//! its measured quantities and wall time, and a failing criterion does not
//! stop the others.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use young_calculus::diagram::{
    coords_to_partition, diagram_from_rayleigh, partition_to_coords, sup_distance, Partition,
};
use young_calculus::free_calculus::{
    cumulants_to_moments, free_poisson_cumulants, invert_k, moments_to_cumulants, CumulantSequence, MomentSequence,
};
use young_calculus::limit_shapes::{
    limit_diagram_from_cumulants, p_c_cauchy, p_c_diagram, p_c_profile, tau_c_measure, ScalingParam,
};
use young_calculus::markov_krein::transition_of_coords;
use young_calculus::measure::Measure;
use young_calculus::numeric::rational::to_f64;
use young_calculus::symmetric_group::{
    character, dim_irrep, factorial, factorization_check, gamma_moments, CentralFunction, CycleType, GammaState,
    RepKind, Representation,
};
use young_calculus::young_measures::{
    concentration_experiment, decompose_central_function, mean_moments, sample_plancherel, sample_schur_weyl,
    schur_weyl_weights, transposition_character, Source, YoungMeasure,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn sc(c: f64) -> ScalingParam {
    ScalingParam::new(c).unwrap()
}

/// Exact identities on every partition of size at most 10.
fn criterion_1() -> Outcome {
    let mut count = 0;
    for q in 1..=10usize {
        for lambda in Partition::all(q) {
            let coords = partition_to_coords(&lambda);
            let mu = transition_of_coords(&coords);
            let atoms = mu.exact_atoms.as_ref().ok_or("transition measure not exact")?;
            ensure(atoms.iter().all(|(_, w)| w.is_positive()), || format!("non-positive mass for {lambda}"))?;
            let total: BigRational = atoms.iter().map(|(_, w)| w.clone()).sum();
            ensure(total.is_one(), || format!("mass {total} for {lambda}"))?;
            let m1: BigRational = atoms.iter().map(|(x, w)| x * w).sum();
            let m2: BigRational = atoms.iter().map(|(x, w)| x * x * w).sum();
            ensure(m1.is_zero(), || format!("m_1 = {m1} for {lambda}"))?;
            ensure(m2 == BigRational::from_integer(q.into()), || format!("m_2 = {m2} for {lambda}"))?;
            let back = coords_to_partition(&coords).map_err(|e| e.to_string())?;
            ensure(back == lambda, || format!("round trip {lambda} -> {back}"))?;
            count += 1;
        }
    }
    for q in 1..=8usize {
        let parts = Partition::all(q);
        let classes = CycleType::all(q);
        let qf = factorial(q);
        for a in &parts {
            for b in &parts {
                let mut s = BigInt::zero();
                for rho in &classes {
                    s += rho.class_size() * character(a, rho).unwrap() * character(b, rho).unwrap();
                }
                let expected = if a == b { qf.clone() } else { BigInt::zero() };
                ensure(s == expected, || format!("⟨χ_{a}, χ_{b}⟩ = {s}"))?;
            }
        }
    }
    Ok(format!("{count} partitions checked, orthogonality for q <= 8"))
}

/// Limit-shape formula against the profile rebuilt from its Rayleigh measure.
fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for c in [0.0, 0.5, 1.0, 2.0] {
        let tau = tau_c_measure(sc(c));
        let mass = tau.total_mass();
        ensure((mass - 1.0).abs() <= 1e-6, || format!("c={c}: τ mass {mass}"))?;
        let w = diagram_from_rayleigh(&tau).map_err(|e| e.to_string())?;
        let b = c + 3.0;
        let mut nodes = w.nodes();
        nodes.extend((0..=4000).map(|k| -b + 2.0 * b * k as f64 / 4000.0));
        let err = nodes.into_iter().map(|u| (w.eval(u) - p_c_profile(sc(c), u)).abs()).fold(0.0, f64::max);
        ensure(err <= 1e-6, || format!("c={c}: sup error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("max sup error {worst:.2e}"))
}

/// Number of non-crossing partitions weighted by cumulants, by brute force
/// over restricted growth strings.
fn nc_moment(r: &[BigRational], n: usize) -> BigRational {
    fn crossing(blocks: &[usize]) -> bool {
        let n = blocks.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        if blocks[a] == blocks[c] && blocks[b] == blocks[d] && blocks[a] != blocks[b] {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
    fn go(cur: &mut Vec<usize>, n: usize, r: &[BigRational], acc: &mut BigRational) {
        if cur.len() == n {
            if !crossing(cur) {
                let k = cur.iter().max().unwrap() + 1;
                let mut sizes = vec![0usize; k];
                for &b in cur.iter() {
                    sizes[b] += 1;
                }
                *acc += sizes.iter().fold(BigRational::one(), |p, &s| p * &r[s - 1]);
            }
            return;
        }
        let next = cur.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            cur.push(b);
            go(cur, n, r, acc);
            cur.pop();
        }
    }
    let mut acc = BigRational::zero();
    go(&mut Vec::new(), n, r, &mut acc);
    acc
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    rat(rng.gen_range(-20..=20), rng.gen_range(1..=9))
}

/// Exact free-cumulant transforms.
fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..25 {
        let r = CumulantSequence::new((0..12).map(|_| random_rational(&mut rng)).collect());
        let back = moments_to_cumulants(&cumulants_to_moments(&r));
        ensure(back.values == r.values, || "cumulant -> moment -> cumulant differs".into())?;
        let m = MomentSequence::new((0..12).map(|_| random_rational(&mut rng)).collect());
        let back = cumulants_to_moments(&moments_to_cumulants(&m));
        ensure(back.values == m.values, || "moment -> cumulant -> moment differs".into())?;
        let m = cumulants_to_moments(&r);
        for n in 1..=6 {
            let brute = nc_moment(&r.values, n);
            ensure(brute == m.get(n), || format!("NC enumeration differs at n={n}"))?;
        }
    }
    for c in [rat(0, 1), rat(1, 2), rat(1, 1), rat(2, 1), rat(-3, 7)] {
        let r = CumulantSequence::new(vec![BigRational::zero(), BigRational::one(), c.clone(), &c * &c]);
        let m4 = cumulants_to_moments(&r).get(4);
        ensure(m4 == &c * &c + BigInt::from(2), || format!("m_4 = {m4} for c = {c}"))?;
    }
    Ok("25 random sequences to order 12, NC brute force n <= 6, m_4 = c^2 + 2".into())
}

/// The analytic pipeline from free Poisson cumulants.
fn criterion_4() -> Outcome {
    let w = free_poisson_cumulants(0.5, 16).map_err(|e| e.to_string())?;
    let diagram = limit_diagram_from_cumulants(&w).map_err(|e| e.to_string())?;
    let target = p_c_diagram(sc(0.5), 8192);
    let mut err = sup_distance(&diagram, &target);
    // the closed form between grid nodes as well
    for u in diagram.nodes() {
        err = err.max((diagram.eval(u) - p_c_profile(sc(0.5), u)).abs());
    }
    ensure(err <= 1e-4, || format!("pipeline sup error {err:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let points: Vec<Complex64> =
        (0..100).map(|_| Complex64::new(rng.gen_range(-6.0..6.0), rng.gen_range(0.05..4.0))).collect();
    let mut worst = 0.0f64;
    for c in [0.5, 1.0, 2.0] {
        let k = free_poisson_cumulants(c, 16).map_err(|e| e.to_string())?.r_transform();
        for &z in &points {
            let g = invert_k(&k, z).map_err(|e| e.to_string())?;
            let d = (g - p_c_cauchy(sc(c), z)).norm();
            ensure(d <= 1e-9, || format!("c={c}, z={z}: |Δ| = {d:e}"))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("pipeline sup error {err:.2e}, invert_k max error {worst:.2e}"))
}

/// Moments of the block operator against the decomposed measure.
fn criterion_5() -> Outcome {
    let mut checked = 0;
    for q in 2..=4 {
        for kind in [RepKind::Trivial, RepKind::Sign, RepKind::Regular] {
            let rep = Representation::new(kind, q).map_err(|e| e.to_string())?;
            let psi = rep.central_function().map_err(|e| e.to_string())?;
            let measure = decompose_central_function(&psi).map_err(|e| e.to_string())?;
            let expected = mean_moments(&measure, 6).map_err(|e| e.to_string())?;
            let got = gamma_moments(&rep, &GammaState::NormalizedTrace, 6).map_err(|e| e.to_string())?;
            ensure(got == expected, || format!("{kind}, q={q}: {:?} vs {:?}", got.values, expected.values))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} representations, k <= 6, exact"))
}

/// Schur–Weyl weights against the decomposition of the tensor trace.
fn criterion_6() -> Outcome {
    for q in 1..=10 {
        for n in 1..=4 {
            let a = schur_weyl_weights(q, n).map_err(|e| e.to_string())?;
            let b = decompose_central_function(&CentralFunction::TensorTrace { q, n }).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("q={q}, N={n} differ"))?;
        }
    }
    let m = schur_weyl_weights(2, 2).map_err(|e| e.to_string())?;
    let two: Partition = "2".parse().unwrap();
    let one_one: Partition = "1,1".parse().unwrap();
    ensure(m.mass(&two) == rat(3, 4) && m.mass(&one_one) == rat(1, 4), || "q=2, N=2 weights".into())?;
    Ok("q <= 10, N <= 4 identical; (3/4, 1/4) at q=2, N=2".into())
}

/// Sampler fidelity.
fn criterion_7() -> Outcome {
    let samples = sample_schur_weyl(6, 3, 100_000, 42).map_err(|e| e.to_string())?;
    let exact = schur_weyl_weights(6, 3).map_err(|e| e.to_string())?;
    let tv = to_f64(&YoungMeasure::empirical(&samples).map_err(|e| e.to_string())?.total_variation(&exact));
    ensure(tv < 0.01, || format!("TV = {tv}"))?;
    let count = 100_000;
    let samples = sample_plancherel(3, count, 42).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (shape, p) in [("3", 1.0 / 6.0), ("2,1", 2.0 / 3.0), ("1,1,1", 1.0 / 6.0)] {
        let l: Partition = shape.parse().unwrap();
        let freq = samples.iter().filter(|s| **s == l).count() as f64 / count as f64;
        let sigma = (p * (1.0 - p) / count as f64).sqrt();
        let z = (freq - p).abs() / sigma;
        ensure(z <= 3.0, || format!("Plancherel {shape}: {freq} vs {p} ({z:.2}σ)"))?;
        worst = worst.max(z);
    }
    Ok(format!("TV = {tv:.4}, Plancherel max deviation {worst:.2}σ"))
}

/// Exact factorization of the tensor trace and the variance scaling of m_3.
fn criterion_8() -> Outcome {
    for q in 2..=10 {
        for n in 1..=4 {
            let r = factorization_check(&CentralFunction::TensorTrace { q, n }, q - 1).map_err(|e| e.to_string())?;
            ensure(r.delta_is_zero, || format!("q={q}, N={n}: δ = {}", r.delta))?;
        }
    }
    let mut ratios = Vec::new();
    for q in [100usize, 400, 1600] {
        let n = 2 * (q as f64).sqrt().round() as u64;
        let r = concentration_experiment(&Source::SchurWeyl { q, n }, 3, 10_000, 42, false).map_err(|e| e.to_string())?;
        ratios.push(r.ratio);
    }
    let factors: Vec<f64> = ratios.windows(2).map(|w| w[0] / w[1]).collect();
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3e}")).collect();
    let detail = format!("Var(m_3)/q^3 = {shown:?}, factors {factors:.3?}");
    ensure(factors.iter().all(|f| (2.5..=6.0).contains(f)), || detail.clone())?;
    Ok(format!("δ = 0 for q <= 10; {detail}"))
}

#[derive(Serialize, Deserialize)]
struct TrendEntry {
    c: f64,
    q: usize,
    mean_distance: f64,
}

#[derive(Serialize, Deserialize)]
struct Trend {
    samples: usize,
    seed: u64,
    tolerance: f64,
    entries: Vec<TrendEntry>,
}

/// Recorded mean distances for the limit-shape trend, with tolerance.
pub const LIMIT_SHAPE_TREND: &str = include_str!("../tests/golden/limit_shape_trend.json");

/// Profile concentration of sampled diagrams around the limit shape.
fn criterion_9() -> Outcome {
    let golden: Trend = serde_json::from_str(LIMIT_SHAPE_TREND).map_err(|e| e.to_string())?;
    let mut table = BTreeMap::new();
    for c in [0.0, 0.5, 2.0] {
        let mut means = Vec::new();
        for q in [400usize, 1600, 6400] {
            let source = if c == 0.0 {
                Source::Plancherel { q }
            } else {
                Source::SchurWeyl { q, n: ((q as f64).sqrt() / c).round() as u64 }
            };
            let r = concentration_experiment(&source, 2, golden.samples, golden.seed, true).map_err(|e| e.to_string())?;
            let d = r.profile.ok_or("no profile statistics")?.mean;
            let g = golden
                .entries
                .iter()
                .find(|e| e.c == c && e.q == q)
                .ok_or_else(|| format!("no golden entry for c={c}, q={q}"))?;
            ensure((d - g.mean_distance).abs() <= golden.tolerance * g.mean_distance, || {
                format!("c={c}, q={q}: {d:.5} outside ±{}% of {:.5}", golden.tolerance * 100.0, g.mean_distance)
            })?;
            means.push(d);
        }
        ensure(means.windows(2).all(|w| w[1] < w[0]), || format!("c={c}: not decreasing {means:.5?}"))?;
        ensure(means[2] < 0.06, || format!("c={c}: q=6400 mean distance {:.5}", means[2]))?;
        table.insert(format!("{c}"), means);
    }
    Ok(format!("mean distances {table:.4?}"))
}

/// Exact Schur–Weyl mass near the transposition value 1/N.
fn criterion_10() -> Outcome {
    let mut masses = Vec::new();
    for q in [20usize, 30, 40] {
        let n = (2.0 * (q as f64).sqrt()).ceil() as u64;
        let m = schur_weyl_weights(q, n).map_err(|e| e.to_string())?;
        let target = rat(1, n as i64);
        let radius = 0.5 / (q as f64).sqrt();
        let mass = m.mass_of(|l| to_f64(&(transposition_character(l) - &target).abs()) <= radius);
        // cross-check the content formula against Murnaghan–Nakayama on the heaviest shape
        let (heaviest, _) = m.masses().iter().max_by(|a, b| a.1.cmp(b.1)).unwrap();
        let mn = BigRational::new(character(heaviest, &CycleType::transposition(q)).unwrap(), dim_irrep(heaviest));
        ensure(mn == transposition_character(heaviest), || format!("character mismatch on {heaviest}"))?;
        masses.push(to_f64(&mass));
    }
    ensure(masses.iter().all(|&m| m >= 0.9), || format!("masses {masses:.4?}"))?;
    ensure(masses.windows(2).all(|w| w[1] >= w[0]), || format!("not non-decreasing {masses:.4?}"))?;
    Ok(format!("masses {masses:.4?} for q = 20, 30, 40"))
}

/// Number of criteria.
pub const COUNT: usize = 10;

const CRITERIA: [(fn() -> Outcome, u64); COUNT] = [
    (criterion_1, 10),
    (criterion_2, 30),
    (criterion_3, 10),
    (criterion_4, 60),
    (criterion_5, 10),
    (criterion_6, 30),
    (criterion_7, 60),
    (criterion_8, 300),
    (criterion_9, 300),
    (criterion_10, 120),
];

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub criterion: usize,
    pub passed: bool,
    pub seconds: f64,
    pub budget_seconds: u64,
    pub detail: String,
}

impl Report {
    pub fn line(&self) -> String {
        format!(
            "criterion {}: {} ({:.1} s) {}",
            self.criterion,
            if self.passed { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

/// Runs criterion `k` (1-based). Exceeding the time budget is a failure.
pub fn run(k: usize) -> Report {
    assert!((1..=COUNT).contains(&k), "criteria are numbered 1..={COUNT}");
    let (f, budget) = CRITERIA[k - 1];
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(format!("panic: {}", msg.unwrap_or_default()))
    });
    let elapsed = start.elapsed();
    let outcome = match outcome {
        Ok(d) if elapsed > Duration::from_secs(budget) => Err(format!("{d}; exceeded {budget} s budget")),
        other => other,
    };
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Report { criterion: k, passed, seconds: elapsed.as_secs_f64(), budget_seconds: budget, detail }
}
