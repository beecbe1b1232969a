use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Young diagram, stored as its weakly decreasing row lengths.
///
/// The empty partition is allowed; it is the base case of RSK insertion
/// and has the flat profile `|u|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("zero part in {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("parts not weakly decreasing: {parts:?}")));
        }
        Ok(Partition { parts })
    }

    /// Builds a partition from row lengths that may contain trailing zeros.
    pub fn from_rows(mut rows: Vec<u32>) -> Result<Self> {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        Partition::new(rows)
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// The one-row diagram `(q)`.
    pub fn row(q: u32) -> Self {
        if q == 0 {
            Partition::empty()
        } else {
            Partition { parts: vec![q] }
        }
    }

    /// The one-column diagram `(1^q)`.
    pub fn column(q: u32) -> Self {
        Partition { parts: vec![1; q as usize] }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of boxes.
    pub fn size(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (0..width)
            .map(|j| self.parts.iter().filter(|&&p| p > j).count() as u32)
            .collect();
        Partition { parts }
    }

    /// `(row, column, content)` for every box, rows and columns from 0.
    pub fn boxes(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.parts.iter().enumerate().flat_map(|(i, &len)| {
            (0..len as usize).map(move |j| (i, j, j as i64 - i as i64))
        })
    }

    /// Hook lengths of all boxes, row by row.
    pub fn hooks(&self) -> Vec<u64> {
        let conj = self.conjugate();
        self.boxes()
            .map(|(i, j, _)| {
                let arm = self.parts[i] as u64 - j as u64 - 1;
                let leg = conj.parts[j] as u64 - i as u64 - 1;
                arm + leg + 1
            })
            .collect()
    }

    /// Product of hook lengths.
    pub fn hook_product(&self) -> BigInt {
        self.hooks().into_iter().fold(BigInt::one(), |acc, h| acc * h)
    }

    /// All partitions of `q`, in reverse lexicographic order.
    pub fn all(q: usize) -> Vec<Partition> {
        Partition::with_max_rows(q, q)
    }

    /// Partitions of `q` with at most `rows` parts, in reverse
    /// lexicographic order.
    pub fn with_max_rows(q: usize, rows: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        fill(q as u32, q as u32, rows, &mut current, &mut out);
        out
    }
}

fn fill(remaining: u32, max: u32, rows: usize, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition { parts: current.clone() });
        return;
    }
    if current.len() == rows {
        return;
    }
    // the remaining rows must be able to hold what is left
    let slots = (rows - current.len()) as u64;
    for p in (1..=remaining.min(max)).rev() {
        if u64::from(p) * slots < u64::from(remaining) {
            break;
        }
        current.push(p);
        fill(remaining - p, p, rows, current, out);
        current.pop();
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        f.write_str(&s.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses comma-separated parts, e.g. `"4,2,1"`. An empty string is the
    /// empty partition.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad part {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// Local minima `x_1 < … < x_n` and maxima `y_1 < … < y_{n-1}` of a
/// diagram profile. For a partition these are the contents of the addable
/// and removable corners.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterlacingCoords {
    minima: Vec<i64>,
    maxima: Vec<i64>,
}

impl InterlacingCoords {
    /// Validates interlacing and centering (`Σx − Σy = 0`).
    pub fn new(minima: Vec<i64>, maxima: Vec<i64>) -> Result<Self> {
        if minima.is_empty() || maxima.len() + 1 != minima.len() {
            return Err(Error::NotInterlacing(format!(
                "{} minima and {} maxima",
                minima.len(),
                maxima.len()
            )));
        }
        for (j, &y) in maxima.iter().enumerate() {
            if !(minima[j] < y && y < minima[j + 1]) {
                return Err(Error::NotInterlacing(format!(
                    "x_{} = {} < y_{} = {} < x_{} = {} fails",
                    j + 1,
                    minima[j],
                    j + 1,
                    y,
                    j + 2,
                    minima[j + 1]
                )));
            }
        }
        let centre: i64 = minima.iter().sum::<i64>() - maxima.iter().sum::<i64>();
        if centre != 0 {
            return Err(Error::NotInterlacing(format!("not centered: sum x - sum y = {centre}")));
        }
        Ok(InterlacingCoords { minima, maxima })
    }

    pub fn minima(&self) -> &[i64] {
        &self.minima
    }

    pub fn maxima(&self) -> &[i64] {
        &self.maxima
    }

    /// Power sums `Σ x_i^k − Σ y_j^k` of the Rayleigh measure, `k = 0..=n`.
    pub fn rayleigh_power_sums(&self, n: usize) -> Vec<i128> {
        (0..=n)
            .map(|k| {
                let pw = |v: i64| (v as i128).pow(k as u32);
                self.minima.iter().map(|&x| pw(x)).sum::<i128>()
                    - self.maxima.iter().map(|&y| pw(y)).sum::<i128>()
            })
            .collect()
    }
}

/// Interlacing coordinates of a partition's profile.
pub fn partition_to_coords(p: &Partition) -> InterlacingCoords {
    let parts = p.parts();
    let rows = parts.len();
    let mut minima = Vec::with_capacity(rows + 1);
    let mut maxima = Vec::with_capacity(rows);
    for i in 0..rows {
        let len = parts[i] as i64;
        if i == 0 || parts[i - 1] > parts[i] {
            minima.push(len - i as i64);
        }
        let next = parts.get(i + 1).copied().unwrap_or(0);
        if parts[i] > next {
            maxima.push(len - 1 - i as i64);
        }
    }
    minima.push(-(rows as i64));
    minima.sort_unstable();
    maxima.sort_unstable();
    InterlacingCoords { minima, maxima }
}

/// Inverse of [`partition_to_coords`]. At integer points the profile is
/// `ω(u) = Σ|u − x_i| − Σ|u − y_j|`, and the box in row `i`, column `j`
/// (both from 1) is present iff `ω(j − i) ≥ i + j`.
pub fn coords_to_partition(c: &InterlacingCoords) -> Result<Partition> {
    let omega = |u: i64| -> i64 {
        c.minima.iter().map(|&x| (u - x).abs()).sum::<i64>() - c.maxima.iter().map(|&y| (u - y).abs()).sum::<i64>()
    };
    let mut parts = Vec::new();
    let mut i = 1i64;
    loop {
        let mut j = 0i64;
        while omega(j + 1 - i) > i + j {
            j += 1;
        }
        if j == 0 {
            break;
        }
        parts.push(j as u32);
        i += 1;
    }
    let p = Partition::new(parts)?;
    if &partition_to_coords(&p) != c {
        return Err(Error::NotInterlacing("coordinates do not come from a partition".into()));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_bad_parts() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert!(Partition::from_rows(vec![2, 0, 0]).is_ok());
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=10).map(|q| Partition::all(q).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
        assert_eq!(Partition::all(40).len(), 37338);
    }

    #[test]
    fn coords_examples() {
        let c = partition_to_coords(&p("1"));
        assert_eq!((c.minima(), c.maxima()), (&[-1, 1][..], &[0][..]));
        let c = partition_to_coords(&p("2"));
        assert_eq!((c.minima(), c.maxima()), (&[-1, 2][..], &[1][..]));
        let c = partition_to_coords(&p("2,1"));
        assert_eq!((c.minima(), c.maxima()), (&[-2, 0, 2][..], &[-1, 1][..]));
        let c = partition_to_coords(&Partition::empty());
        assert_eq!((c.minima(), c.maxima()), (&[0][..], &[][..]));
    }

    #[test]
    fn coords_are_valid_and_centered_exhaustively() {
        for q in 0..=12 {
            for lambda in Partition::all(q) {
                let c = partition_to_coords(&lambda);
                InterlacingCoords::new(c.minima.clone(), c.maxima.clone())
                    .unwrap_or_else(|e| panic!("{lambda}: {e}"));
                // second Rayleigh power sum is twice the size
                assert_eq!(c.rayleigh_power_sums(2)[2], 2 * q as i128, "{lambda}");
            }
        }
    }

    #[test]
    fn conjugate_and_hooks() {
        assert_eq!(p("3,1").conjugate(), p("2,1,1"));
        assert_eq!(p("2,1").hooks(), vec![3, 1, 1]);
        assert_eq!(p("3,2").hook_product(), BigInt::from(24));
    }

    #[test]
    fn rows_limited_enumeration() {
        for q in 0..=12 {
            for r in 0..=q + 1 {
                let expected: Vec<Partition> = Partition::all(q).into_iter().filter(|l| l.rows() <= r).collect();
                assert_eq!(Partition::with_max_rows(q, r), expected, "q={q} rows<={r}");
            }
        }
    }

    #[test]
    fn coords_round_trip() {
        for q in 0..=9 {
            for l in Partition::all(q) {
                assert_eq!(coords_to_partition(&partition_to_coords(&l)).unwrap(), l);
            }
        }
    }

    #[test]
    fn rejects_non_interlacing() {
        assert!(InterlacingCoords::new(vec![-1, 1], vec![2]).is_err());
        assert!(InterlacingCoords::new(vec![-1, 2], vec![0]).is_err()); // not centered
        assert!(InterlacingCoords::new(vec![0], vec![]).is_ok());
    }
}
