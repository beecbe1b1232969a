use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::weights::YoungMeasure;
use crate::diagram::Partition;
use crate::error::{Error, Result};
use crate::numeric::rational::to_f64;

/// Shape of the RSK insertion tableau of a word (row insertion, bumping
/// the leftmost entry strictly greater than the inserted letter).
pub fn rsk_shape(word: &[u32]) -> Partition {
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for &letter in word {
        let mut x = letter;
        let mut r = 0;
        loop {
            if r == rows.len() {
                rows.push(vec![x]);
                break;
            }
            let row = &mut rows[r];
            let k = row.partition_point(|&y| y <= x);
            if k == row.len() {
                row.push(x);
                break;
            }
            x = std::mem::replace(&mut row[k], x);
            r += 1;
        }
    }
    Partition::new(rows.iter().map(|r| r.len() as u32).collect()).expect("RSK rows weakly decrease")
}

/// Generator for sample `i` of the seed ladder: the master seed picks the
/// key and `i` the stream, so results do not depend on scheduling.
pub fn ladder_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

fn ladder<T: Send>(count: usize, seed: u64, f: impl Fn(&mut ChaCha8Rng) -> T + Sync) -> Vec<T> {
    (0..count as u64).into_par_iter().map(|i| f(&mut ladder_rng(seed, i))).collect()
}

/// RSK shapes of `count` uniform words of length `q` over `{1, …, N}`.
pub fn sample_schur_weyl(q: usize, n: u64, count: usize, seed: u64) -> Result<Vec<Partition>> {
    if q == 0 || n == 0 {
        return Err(Error::InvalidArgument("need q >= 1 and N >= 1".into()));
    }
    let n = u32::try_from(n).map_err(|_| Error::InvalidArgument("N too large".into()))?;
    Ok(ladder(count, seed, |rng| {
        let word: Vec<u32> = (0..q).map(|_| rng.gen_range(1..=n)).collect();
        rsk_shape(&word)
    }))
}

/// RSK shapes of `count` uniform permutations of `q` letters.
pub fn sample_plancherel(q: usize, count: usize, seed: u64) -> Result<Vec<Partition>> {
    if q == 0 {
        return Err(Error::InvalidArgument("need q >= 1".into()));
    }
    Ok(ladder(count, seed, |rng| {
        let mut perm: Vec<u32> = (1..=q as u32).collect();
        perm.shuffle(rng);
        rsk_shape(&perm)
    }))
}

/// Draws from an exhaustive measure by its (rounded) weights.
pub fn sample_measure(m: &YoungMeasure, count: usize, seed: u64) -> Result<Vec<Partition>> {
    if !m.is_exhaustive() {
        return Err(Error::EmpiricalMeasure);
    }
    let (shapes, weights): (Vec<&Partition>, Vec<f64>) = m.masses().iter().map(|(l, p)| (l, to_f64(p))).unzip();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(ladder(count, seed, |rng| shapes[dist.sample(rng)].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young_measures::{plancherel_weights, schur_weyl_weights};
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn shape_examples() {
        assert_eq!(rsk_shape(&[1, 2, 3]), p("3"));
        assert_eq!(rsk_shape(&[3, 2, 1]), p("1,1,1"));
        assert_eq!(rsk_shape(&[2, 1, 2]), p("2,1"));
        assert_eq!(rsk_shape(&[1, 1, 1]), p("3"));
        assert_eq!(rsk_shape(&[2, 3, 1, 2]), p("2,2"));
    }

    #[test]
    fn shape_counts_match_dimension_identities() {
        // over all words in {1,2,3}^4 the shape λ occurs dim[λ]·dim E_λ times
        let (q, n) = (4usize, 3u32);
        let mut counts = std::collections::BTreeMap::new();
        for code in 0..n.pow(q as u32) {
            let word: Vec<u32> = (0..q).map(|i| code / n.pow(i as u32) % n + 1).collect();
            *counts.entry(rsk_shape(&word)).or_insert(0u64) += 1;
        }
        let exact = schur_weyl_weights(q, n as u64).unwrap();
        for (l, c) in counts {
            assert_eq!(
                num_rational::BigRational::new(c.into(), (n as u64).pow(q as u32).into()),
                exact.mass(&l)
            );
        }
    }

    #[test]
    fn determinism_and_trivial_cases() {
        let a = sample_schur_weyl(7, 3, 50, 9).unwrap();
        assert_eq!(a, sample_schur_weyl(7, 3, 50, 9).unwrap());
        assert_ne!(a, sample_schur_weyl(7, 3, 50, 10).unwrap());
        assert!(sample_schur_weyl(5, 1, 20, 1).unwrap().iter().all(|l| *l == p("5")));
        assert!(sample_plancherel(1, 10, 1).unwrap().iter().all(|l| *l == p("1")));
        assert_eq!(sample_plancherel(6, 30, 3).unwrap(), sample_plancherel(6, 30, 3).unwrap());
    }

    fn chi_square_passes(samples: &[Partition], exact: &YoungMeasure) -> bool {
        let n = samples.len() as f64;
        let emp = YoungMeasure::empirical(samples).unwrap();
        let mut stat = 0.0;
        let mut cells = 0;
        for (l, pl) in exact.masses() {
            let e = n * to_f64(pl);
            let o = n * to_f64(&emp.mass(l));
            stat += (o - e).powi(2) / e;
            cells += 1;
        }
        let crit = ChiSquared::new((cells - 1) as f64).unwrap().inverse_cdf(1.0 - 1e-3);
        stat < crit
    }

    #[test]
    fn schur_weyl_sampler_goodness_of_fit() {
        for (q, n) in [(4, 2), (5, 3), (6, 3)] {
            let samples = sample_schur_weyl(q, n, 100_000, 42).unwrap();
            let exact = schur_weyl_weights(q, n).unwrap();
            assert!(chi_square_passes(&samples, &exact), "q={q} N={n}");
        }
    }

    #[test]
    fn schur_weyl_total_variation() {
        let samples = sample_schur_weyl(6, 3, 100_000, 42).unwrap();
        let tv = YoungMeasure::empirical(&samples).unwrap().total_variation(&schur_weyl_weights(6, 3).unwrap());
        assert!(to_f64(&tv) < 0.01);
    }

    #[test]
    fn plancherel_sampler() {
        let samples = sample_plancherel(5, 50_000, 42).unwrap();
        assert!(chi_square_passes(&samples, &plancherel_weights(5).unwrap()));
    }

    #[test]
    fn measure_sampler() {
        let exact = schur_weyl_weights(5, 2).unwrap();
        let samples = sample_measure(&exact, 50_000, 42).unwrap();
        assert!(chi_square_passes(&samples, &exact));
    }
}
