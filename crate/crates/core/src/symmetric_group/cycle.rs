use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::diagram::Partition;
use crate::error::{Error, Result};

/// Conjugacy class of `S_q`, recorded by its cycle lengths (fixed points
/// included as parts equal to 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct CycleType {
    lengths: Partition,
}

impl CycleType {
    pub fn from_partition(lengths: Partition) -> Self {
        CycleType { lengths }
    }

    /// The class in `S_q` with the given non-trivial cycles, padded with
    /// fixed points.
    pub fn from_cycles(cycles: &[u32], q: usize) -> Result<Self> {
        let mut parts: Vec<u32> = cycles.iter().copied().filter(|&l| l >= 2).collect();
        if cycles.contains(&0) {
            return Err(Error::InvalidPartition("cycle of length 0".into()));
        }
        let moved: usize = parts.iter().map(|&l| l as usize).sum();
        if moved > q {
            return Err(Error::SizeMismatch(format!("cycles move {moved} points but q = {q}")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts.extend(std::iter::repeat_n(1, q - moved));
        Ok(CycleType { lengths: Partition::new(parts)? })
    }

    pub fn identity(q: usize) -> Self {
        CycleType { lengths: Partition::column(q as u32) }
    }

    /// A single transposition in `S_q`, `q ≥ 2`.
    pub fn transposition(q: usize) -> Self {
        CycleType::from_cycles(&[2], q).expect("transposition needs q >= 2")
    }

    pub fn lengths(&self) -> &Partition {
        &self.lengths
    }

    pub fn q(&self) -> usize {
        self.lengths.size()
    }

    /// Number of cycles `c(ρ)`.
    pub fn cycles(&self) -> usize {
        self.lengths.rows()
    }

    /// Length `|ρ| = q − c(ρ)`, the minimal number of transpositions.
    pub fn length(&self) -> usize {
        self.q() - self.cycles()
    }

    /// Number of non-fixed points `s(ρ)`.
    pub fn support(&self) -> usize {
        self.nontrivial().iter().map(|&l| l as usize).sum()
    }

    /// Cycle lengths `≥ 2`, decreasing.
    pub fn nontrivial(&self) -> Vec<u32> {
        self.lengths.parts().iter().copied().filter(|&l| l >= 2).collect()
    }

    /// The product of two permutations with disjoint supports, one of each
    /// class.
    pub fn disjoint_product(&self, other: &CycleType) -> Result<CycleType> {
        if self.q() != other.q() {
            return Err(Error::SizeMismatch(format!("S_{} vs S_{}", self.q(), other.q())));
        }
        let mut cycles = self.nontrivial();
        cycles.extend(other.nontrivial());
        CycleType::from_cycles(&cycles, self.q())
    }

    /// `q! / ∏_k k^{m_k} m_k!`.
    pub fn class_size(&self) -> BigInt {
        let q = self.q();
        let mut denom = BigInt::one();
        let parts = self.lengths.parts();
        let mut i = 0;
        while i < parts.len() {
            let k = parts[i];
            let mut m = 0u32;
            while i < parts.len() && parts[i] == k {
                m += 1;
                i += 1;
                denom *= BigInt::from(k) * BigInt::from(m);
            }
        }
        factorial(q) / denom
    }

    /// All classes of `S_q`.
    pub fn all(q: usize) -> Vec<CycleType> {
        Partition::all(q).into_iter().map(CycleType::from_partition).collect()
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

impl TryFrom<Vec<u32>> for CycleType {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v).map(CycleType::from_partition)
    }
}

impl From<CycleType> for Vec<u32> {
    fn from(c: CycleType) -> Self {
        c.lengths.into()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.lengths.fmt(f)
    }
}

impl FromStr for CycleType {
    type Err = Error;
    /// Comma-separated cycle lengths, fixed points included: `"3,2,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad cycle length {t:?}"))))
            .collect::<Result<Vec<u32>>>()?;
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType::from_partition(Partition::new(parts)?))
    }
}

/// Cycle type of a permutation of `{1, …, q}` in one-line notation.
pub fn cycle_stats(perm: &[usize]) -> Result<CycleType> {
    let q = perm.len();
    let mut seen = vec![false; q];
    for &v in perm {
        if v == 0 || v > q || seen[v - 1] {
            return Err(Error::NotPermutation(format!("{perm:?} is not a bijection of 1..={q}")));
        }
        seen[v - 1] = true;
    }
    let mut visited = vec![false; q];
    let mut lengths = Vec::new();
    for start in 0..q {
        if visited[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !visited[i] {
            visited[i] = true;
            i = perm[i] - 1;
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    Ok(CycleType::from_partition(Partition::new(lengths)?))
}
