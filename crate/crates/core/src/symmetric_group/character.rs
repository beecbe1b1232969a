//! Irreducible characters by the Murnaghan–Nakayama rule on beta-sets
//! (abacus form): removing a border strip of length `k` moves one bead from
//! position `b` to the empty position `b − k`, with sign `(−1)^{beads
//! strictly between}`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::cycle::{factorial, CycleType};
use crate::diagram::Partition;
use crate::error::{Error, Result};

/// `dim[λ] = q! / ∏ hooks`.
pub fn dim_irrep(lambda: &Partition) -> BigInt {
    factorial(lambda.size()) / lambda.hook_product()
}

type Key = (Vec<u32>, Vec<u32>);

fn memo() -> &'static RwLock<HashMap<Key, BigInt>> {
    static MEMO: OnceLock<RwLock<HashMap<Key, BigInt>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Unnormalized character `χ̂_λ(ρ)`.
pub fn character(lambda: &Partition, rho: &CycleType) -> Result<BigInt> {
    if lambda.size() != rho.q() {
        return Err(Error::SizeMismatch(format!("|λ| = {} but ρ ∈ S_{}", lambda.size(), rho.q())));
    }
    Ok(mn(lambda.parts(), &rho.nontrivial()))
}

/// Normalized character `χ_λ(ρ) = χ̂_λ(ρ) / dim[λ]`.
pub fn normalized_character(lambda: &Partition, rho: &CycleType) -> Result<BigRational> {
    let chi = character(lambda, rho)?;
    Ok(BigRational::new(chi, dim_irrep(lambda)))
}

/// `cycles` are the non-trivial cycle lengths still to be removed, in
/// decreasing order; the remaining fixed points are implicit.
fn mn(parts: &[u32], cycles: &[u32]) -> BigInt {
    let Some((&k, rest)) = cycles.split_first() else {
        // only fixed points left
        let p = Partition::new(parts.to_vec()).expect("shape stays a partition");
        return dim_irrep(&p);
    };
    let key = (parts.to_vec(), cycles.to_vec());
    if let Some(v) = memo().read().expect("character memo poisoned").get(&key) {
        return v.clone();
    }
    let n = parts.len();
    let beta: Vec<i64> = parts.iter().enumerate().map(|(i, &p)| p as i64 + (n - 1 - i) as i64).collect();
    let k = k as i64;
    let mut total = BigInt::zero();
    for (i, &b) in beta.iter().enumerate() {
        let target = b - k;
        if target < 0 || beta.contains(&target) {
            continue;
        }
        let between = beta.iter().filter(|&&x| target < x && x < b).count();
        let mut moved = beta.clone();
        moved[i] = target;
        moved.sort_unstable_by(|a, b| b.cmp(a));
        let m = moved.len();
        let shape: Vec<u32> = moved
            .iter()
            .enumerate()
            .map(|(j, &x)| (x - (m - 1 - j) as i64) as u32)
            .filter(|&p| p > 0)
            .collect();
        let v = mn(&shape, rest);
        if between % 2 == 0 {
            total += v;
        } else {
            total -= v;
        }
    }
    memo().write().expect("character memo poisoned").entry(key).or_insert_with(|| total.clone());
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::{int, rat};
    use num_traits::{One, Signed};

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }
    fn ct(s: &str) -> CycleType {
        s.parse().unwrap()
    }

    #[test]
    fn dims() {
        assert_eq!(dim_irrep(&p("3")), BigInt::one());
        assert_eq!(dim_irrep(&p("2,1")), BigInt::from(2));
        assert_eq!(dim_irrep(&p("3,2")), BigInt::from(5));
    }

    /// Number of standard Young tableaux, by removing corners recursively.
    fn syt(parts: &[u32]) -> u64 {
        if parts.is_empty() {
            return 1;
        }
        let mut total = 0;
        for i in 0..parts.len() {
            let next = parts.get(i + 1).copied().unwrap_or(0);
            if parts[i] > next {
                let mut smaller = parts.to_vec();
                smaller[i] -= 1;
                if smaller[i] == 0 {
                    smaller.pop();
                }
                total += syt(&smaller);
            }
        }
        total
    }

    #[test]
    fn hook_formula_counts_tableaux() {
        for q in 1..=8 {
            for lambda in Partition::all(q) {
                assert_eq!(dim_irrep(&lambda), BigInt::from(syt(lambda.parts())), "{lambda}");
            }
        }
    }

    #[test]
    fn character_examples() {
        for q in 1..=7 {
            for rho in CycleType::all(q) {
                assert_eq!(normalized_character(&Partition::row(q as u32), &rho).unwrap(), int(1));
                let sign = if rho.length() % 2 == 0 { 1 } else { -1 };
                assert_eq!(normalized_character(&Partition::column(q as u32), &rho).unwrap(), int(sign));
            }
        }
        assert_eq!(normalized_character(&p("2,1"), &ct("3")).unwrap(), rat(-1, 2));
        assert!(normalized_character(&p("2,1"), &ct("2,1,1")).is_err());
    }

    /// Character table of S_3 from explicit 2×2 matrices of the standard
    /// representation: trace of (1 2) is 0, trace of (1 2 3) is −1.
    #[test]
    fn s3_table_matches_matrix_oracle() {
        type M = [[i64; 2]; 2];
        let mul = |a: M, b: M| -> M {
            let mut c = [[0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
                }
            }
            c
        };
        // basis e1 − e2, e2 − e3 of the sum-zero subspace
        let s1: M = [[-1, 1], [0, 1]];
        let s2: M = [[1, 0], [1, -1]];
        let three = mul(s1, s2);
        assert_eq!(character(&p("2,1"), &ct("2,1")).unwrap(), BigInt::from(s1[0][0] + s1[1][1]));
        assert_eq!(character(&p("2,1"), &ct("3")).unwrap(), BigInt::from(three[0][0] + three[1][1]));
    }

    #[test]
    fn orthogonality() {
        for q in 1..=8 {
            let classes = CycleType::all(q);
            let lambdas = Partition::all(q);
            for a in &lambdas {
                for b in &lambdas {
                    let s: BigInt = classes
                        .iter()
                        .map(|c| c.class_size() * character(a, c).unwrap() * character(b, c).unwrap())
                        .sum();
                    let expected = if a == b { factorial(q) } else { BigInt::zero() };
                    assert_eq!(s, expected, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn transposition_character_is_content_sum() {
        for q in 2..=10 {
            for lambda in Partition::all(q) {
                let contents: i64 = lambda.boxes().map(|b| b.2).sum();
                let expected = rat(2 * contents, (q * (q - 1)) as i64);
                let got = normalized_character(&lambda, &CycleType::transposition(q)).unwrap();
                assert_eq!(got, expected, "{lambda}");
                assert!(got.abs() <= int(1));
            }
        }
    }
}
