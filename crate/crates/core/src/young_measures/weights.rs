use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::diagram::{partition_to_coords, Partition};
use crate::error::{Error, Result};
use crate::free_calculus::MomentSequence;
use crate::markov_krein::coords_moments;
use crate::numeric::rational::{format_rational, parse_rational};
use crate::symmetric_group::{dim_irrep, factorial, normalized_character, CentralFunction, CycleType};

/// A probability measure on the partitions of `q`.
///
/// Masses are exact rationals. An exhaustive measure lists every partition
/// with non-zero mass; an empirical one holds sample frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct YoungMeasure {
    q: usize,
    masses: BTreeMap<Partition, BigRational>,
    exhaustive: bool,
}

impl YoungMeasure {
    /// Validates sizes, non-negativity and total mass 1.
    pub fn new(q: usize, masses: BTreeMap<Partition, BigRational>, exhaustive: bool) -> Result<Self> {
        let mut total = BigRational::zero();
        for (lambda, p) in &masses {
            if lambda.size() != q {
                return Err(Error::SizeMismatch(format!("{lambda} is not a partition of {q}")));
            }
            if p.is_negative() {
                return Err(Error::InvalidArgument(format!("negative mass {} on {lambda}", format_rational(p))));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!("masses sum to {}", format_rational(&total))));
        }
        Ok(YoungMeasure { q, masses, exhaustive })
    }

    /// Frequencies of a sample of partitions of a common size.
    pub fn empirical(samples: &[Partition]) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::InvalidArgument("empty sample".into()));
        };
        let mut counts: BTreeMap<Partition, u64> = BTreeMap::new();
        for s in samples {
            *counts.entry(s.clone()).or_default() += 1;
        }
        let n = BigInt::from(samples.len());
        let masses = counts
            .into_iter()
            .map(|(l, c)| (l, BigRational::new(BigInt::from(c), n.clone())))
            .collect();
        YoungMeasure::new(first.size(), masses, false)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn masses(&self) -> &BTreeMap<Partition, BigRational> {
        &self.masses
    }

    /// Mass of `λ`, zero when absent.
    pub fn mass(&self, lambda: &Partition) -> BigRational {
        self.masses.get(lambda).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `Π(V)` for `V = {λ : pred(λ)}`.
    pub fn mass_of(&self, pred: impl Fn(&Partition) -> bool) -> BigRational {
        self.masses.iter().filter(|(l, _)| pred(l)).map(|(_, p)| p).sum()
    }

    /// Total-variation distance `½ Σ |p − p'|`.
    pub fn total_variation(&self, other: &YoungMeasure) -> BigRational {
        let mut keys: Vec<&Partition> = self.masses.keys().collect();
        keys.extend(other.masses.keys());
        keys.sort();
        keys.dedup();
        let sum: BigRational = keys.into_iter().map(|l| (self.mass(l) - other.mass(l)).abs()).sum();
        sum / BigInt::from(2)
    }
}

#[derive(Serialize, Deserialize)]
struct RawMeasure {
    q: usize,
    exhaustive: bool,
    masses: BTreeMap<String, String>,
}

impl Serialize for YoungMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawMeasure {
            q: self.q,
            exhaustive: self.exhaustive,
            masses: self.masses.iter().map(|(l, p)| (l.to_string(), format_rational(p))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for YoungMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = RawMeasure::deserialize(d)?;
        let mut masses = BTreeMap::new();
        for (l, p) in raw.masses {
            let lambda: Partition = l.parse().map_err(D::Error::custom)?;
            masses.insert(lambda, parse_rational(&p).map_err(D::Error::custom)?);
        }
        YoungMeasure::new(raw.q, masses, raw.exhaustive).map_err(D::Error::custom)
    }
}

/// `dim E_λ` for `GL(N)`, the hook-content product `∏ (N + c) / h`.
pub fn gl_dimension(lambda: &Partition, n: u64) -> BigInt {
    if lambda.rows() as u64 > n {
        return BigInt::zero();
    }
    let num = lambda.boxes().fold(BigInt::one(), |acc, (_, _, c)| acc * BigInt::from(n as i64 + c));
    num / lambda.hook_product()
}

/// The Schur–Weyl measure `p_λ = dim[λ] · dim E_λ / N^q` of `(ℂ^N)^{⊗q}`.
pub fn schur_weyl_weights(q: usize, n: u64) -> Result<YoungMeasure> {
    if q == 0 || n == 0 {
        return Err(Error::InvalidArgument("need q >= 1 and N >= 1".into()));
    }
    let total = BigInt::from(n).pow(q as u32);
    let rows = usize::try_from(n).unwrap_or(usize::MAX).min(q);
    let masses = Partition::with_max_rows(q, rows)
        .into_iter()
        .map(|l| {
            let p = BigRational::new(dim_irrep(&l) * gl_dimension(&l, n), total.clone());
            (l, p)
        })
        .collect();
    YoungMeasure::new(q, masses, true)
}

/// The Plancherel measure `dim[λ]² / q!`.
pub fn plancherel_weights(q: usize) -> Result<YoungMeasure> {
    if q == 0 {
        return Err(Error::InvalidArgument("need q >= 1".into()));
    }
    let qf = factorial(q);
    let masses = Partition::all(q)
        .into_iter()
        .map(|l| {
            let d = dim_irrep(&l);
            (l, BigRational::new(&d * &d, qf.clone()))
        })
        .collect();
    YoungMeasure::new(q, masses, true)
}

/// Largest `q` accepted by [`decompose_central_function`].
pub const MAX_DECOMPOSE_Q: usize = 12;

/// `p_λ = dim[λ] · (1/q!) Σ_ρ |ρ| ψ(ρ) χ̂_λ(ρ)`, the coefficients of
/// `ψ = Σ p_λ χ_λ` in normalized characters.
pub fn decompose_central_function(f: &CentralFunction) -> Result<YoungMeasure> {
    let q = f.q();
    if q == 0 || q > MAX_DECOMPOSE_Q {
        return Err(Error::InvalidArgument(format!("decomposition needs 1 <= q <= {MAX_DECOMPOSE_Q}")));
    }
    f.check_normalized()?;
    let classes: Vec<(CycleType, BigRational)> = CycleType::all(q)
        .into_iter()
        .map(|rho| {
            let weight = BigRational::from_integer(rho.class_size()) * f.eval(&rho)?;
            Ok((rho, weight))
        })
        .collect::<Result<_>>()?;
    let qf = BigRational::from_integer(factorial(q));
    let mut masses = BTreeMap::new();
    for lambda in Partition::all(q) {
        let d = BigRational::from_integer(dim_irrep(&lambda));
        let mut s = BigRational::zero();
        for (rho, w) in &classes {
            // dim·χ_λ = χ̂_λ
            s += w * normalized_character(&lambda, rho)? * &d;
        }
        let p = s * &d / &qf;
        if p.is_negative() {
            return Err(Error::NotPositiveDefinite { partition: lambda.to_string(), mass: format_rational(&p) });
        }
        if !p.is_zero() {
            masses.insert(lambda, p);
        }
    }
    YoungMeasure::new(q, masses, true)
}

/// `m_k(Π) = Σ_λ p_λ m_k(λ)`, `k = 1..=n`, exact.
pub fn mean_moments(m: &YoungMeasure, n: usize) -> Result<MomentSequence<BigRational>> {
    if !m.exhaustive {
        return Err(Error::EmpiricalMeasure);
    }
    let mut acc = vec![BigRational::zero(); n];
    for (lambda, p) in &m.masses {
        let mk = coords_moments(&partition_to_coords(lambda), n);
        for (k, slot) in acc.iter_mut().enumerate() {
            *slot += p * mk.get(k + 1);
        }
    }
    Ok(MomentSequence::new(acc))
}

/// Outcome of a γ-support query.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportQuery {
    /// `Π(V)`.
    pub mass: BigRational,
    /// `Π(V) > 1 − γ`.
    pub supported: bool,
}

/// Whether the measure is `γ`-supported on `{λ : pred(λ)}`.
pub fn gamma_support_query(m: &YoungMeasure, pred: impl Fn(&Partition) -> bool, gamma: &BigRational) -> Result<SupportQuery> {
    if !m.exhaustive {
        return Err(Error::EmpiricalMeasure);
    }
    let mass = m.mass_of(pred);
    let supported = mass > BigRational::one() - gamma;
    Ok(SupportQuery { mass, supported })
}

/// `χ_λ((1 2)) = 2 Σ contents / (q(q − 1))`.
pub fn transposition_character(lambda: &Partition) -> BigRational {
    let q = lambda.size() as i64;
    let s: i64 = lambda.boxes().map(|(_, _, c)| c).sum();
    BigRational::new(BigInt::from(2 * s), BigInt::from(q * (q - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::{int, rat};
    use crate::symmetric_group::{tensor_trace, GradedTensorState, Representation, RepKind};

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn schur_weyl_examples() {
        let m = schur_weyl_weights(2, 2).unwrap();
        assert_eq!(m.mass(&p("2")), rat(3, 4));
        assert_eq!(m.mass(&p("1,1")), rat(1, 4));
        let m = schur_weyl_weights(3, 2).unwrap();
        assert_eq!(m.mass(&p("3")), rat(1, 2));
        assert_eq!(m.mass(&p("2,1")), rat(1, 2));
        assert_eq!(m.mass(&p("1,1,1")), int(0));
        for q in 1..=7 {
            let m = schur_weyl_weights(q, 1).unwrap();
            assert_eq!(m.masses().len(), 1);
            assert_eq!(m.mass(&Partition::row(q as u32)), int(1));
        }
    }

    #[test]
    fn gl_dimension_matches_tensor_count() {
        // Σ dim[λ] dim E_λ = N^q
        for q in 1..=8 {
            for n in 1..=4u64 {
                let total: BigInt = Partition::all(q).iter().map(|l| dim_irrep(l) * gl_dimension(l, n)).sum();
                assert_eq!(total, BigInt::from(n).pow(q as u32));
            }
        }
        // symmetric and exterior powers
        assert_eq!(gl_dimension(&p("3"), 4), BigInt::from(20));
        assert_eq!(gl_dimension(&p("1,1,1"), 4), BigInt::from(4));
    }

    #[test]
    fn decomposition_examples() {
        let m = decompose_central_function(&CentralFunction::Trivial(5)).unwrap();
        assert_eq!(m.mass(&p("5")), int(1));
        let m = decompose_central_function(&CentralFunction::Sign(5)).unwrap();
        assert_eq!(m.mass(&p("1,1,1,1,1")), int(1));
        let m = decompose_central_function(&CentralFunction::TensorTrace { q: 2, n: 2 }).unwrap();
        assert_eq!(m, schur_weyl_weights(2, 2).unwrap());
        let m = decompose_central_function(&CentralFunction::Character(p("3,1"))).unwrap();
        assert_eq!(m.mass(&p("3,1")), int(1));
    }

    #[test]
    fn decomposition_reproduces_values() {
        let f = CentralFunction::Graded { q: 5, state: GradedTensorState::new(vec![rat(1, 2), rat(1, 4)], vec![rat(1, 4)]).unwrap() };
        let m = decompose_central_function(&f).unwrap();
        for rho in CycleType::all(5) {
            let s: BigRational = m
                .masses()
                .iter()
                .map(|(l, pl)| pl * normalized_character(l, &rho).unwrap())
                .sum();
            assert_eq!(s, f.eval(&rho).unwrap(), "ρ = {rho}");
        }
    }

    #[test]
    fn schur_weyl_equals_decomposed_tensor_trace() {
        for q in 1..=7 {
            for n in 1..=3 {
                let a = schur_weyl_weights(q, n).unwrap();
                let b = decompose_central_function(&CentralFunction::TensorTrace { q, n }).unwrap();
                assert_eq!(a, b, "q={q} N={n}");
            }
        }
    }

    #[test]
    fn not_positive_definite() {
        // ψ(e) = 1, ψ((1 2)) = 2 is not a convex combination of characters
        let mut values = BTreeMap::new();
        values.insert(CycleType::identity(2), int(1));
        values.insert(CycleType::transposition(2), int(2));
        let err = decompose_central_function(&CentralFunction::Table { q: 2, values }).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }

    #[test]
    fn mean_moment_examples() {
        let m = schur_weyl_weights(2, 2).unwrap();
        let mm = mean_moments(&m, 3).unwrap();
        assert_eq!(mm.values, vec![int(0), int(2), int(1)]);
        let emp = YoungMeasure::empirical(&[p("2"), p("1,1")]).unwrap();
        assert_eq!(mean_moments(&emp, 2), Err(Error::EmpiricalMeasure));
    }

    #[test]
    fn third_moment_is_transposition_value() {
        // m_3(ψ) = q(q−1) ψ((1 2))
        for q in 2..=8 {
            for n in 1..=4u64 {
                let mm = mean_moments(&schur_weyl_weights(q, n).unwrap(), 3).unwrap();
                let psi = tensor_trace(n, &CycleType::transposition(q));
                assert_eq!(mm.get(3), psi * BigInt::from(q * (q - 1)));
            }
            let mm = mean_moments(&plancherel_weights(q).unwrap(), 3).unwrap();
            assert_eq!(mm.get(3), int(0));
        }
    }

    #[test]
    fn gamma_moments_match_mean_moments() {
        for q in 2..=4 {
            for kind in [RepKind::Trivial, RepKind::Sign, RepKind::Regular, RepKind::Tensor(2)] {
                let rep = Representation::new(kind, q).unwrap();
                let measure = decompose_central_function(&rep.central_function().unwrap()).unwrap();
                let expected = mean_moments(&measure, 6).unwrap();
                let got = crate::symmetric_group::gamma_moments(&rep, &crate::symmetric_group::GammaState::NormalizedTrace, 6).unwrap();
                assert_eq!(got, expected, "{kind} q={q}");
            }
        }
    }

    #[test]
    fn support_queries() {
        let m = schur_weyl_weights(8, 4).unwrap();
        let half = rat(1, 2);
        let all = gamma_support_query(&m, |_| true, &rat(1, 100)).unwrap();
        assert!(all.supported && all.mass == int(1));
        let none = gamma_support_query(&m, |_| false, &half).unwrap();
        assert!(!none.supported && none.mass.is_zero());
        // concentration sets grow with the threshold
        let mean3 = mean_moments(&m, 3).unwrap().get(3);
        let scale = 8f64.powf(1.5);
        let mut last = int(0);
        for t in [0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0] {
            let q = gamma_support_query(
                &m,
                |l| {
                    let m3 = coords_moments(&partition_to_coords(l), 3).get(3);
                    crate::numeric::rational::to_f64(&(m3 - &mean3)).abs() <= t * scale
                },
                &half,
            )
            .unwrap();
            assert!(q.mass >= last);
            last = q.mass;
        }
        assert_eq!(last, int(1));
    }

    #[test]
    fn transposition_character_matches_mn() {
        for l in Partition::all(7) {
            assert_eq!(transposition_character(&l), normalized_character(&l, &CycleType::transposition(7)).unwrap());
        }
    }

    #[test]
    fn serde_round_trip() {
        let m = schur_weyl_weights(4, 2).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"3,1\":\"9/16\""), "{s}");
        let back: YoungMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn total_variation_examples() {
        let a = schur_weyl_weights(2, 2).unwrap();
        let b = plancherel_weights(2).unwrap();
        assert_eq!(a.total_variation(&b), rat(1, 4));
        assert!(a.total_variation(&a).is_zero());
    }
}
