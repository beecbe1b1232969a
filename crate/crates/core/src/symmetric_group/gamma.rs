//! Explicit integer representations of `S_q` and the block operator
//! `Γ(r)` on `(q+1)` copies of the representation space: blocks equal to
//! the identity in row and column 0, `r((i j))` at `(i, j)` otherwise, and
//! zero on the diagonal. Its moments under the block-averaged state are
//! the mean moments of the diagrams under the induced measure.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::central::CentralFunction;
use super::cycle::CycleType;
use crate::error::{Error, Result};
use crate::free_calculus::MomentSequence;

/// Dense square integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "matrix sizes differ");
        let n = self.n;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn trace(&self) -> i128 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }
}

/// The representations built in: one-dimensional trivial and sign, the
/// left regular representation, and the action on `(ℂ^N)^{⊗q}` by
/// permuting tensor factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    Trivial,
    Sign,
    Regular,
    Tensor(u64),
}

impl FromStr for RepKind {
    type Err = Error;
    /// `trivial`, `sign`, `regular` or `tensor:N`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(RepKind::Trivial),
            "sign" => Ok(RepKind::Sign),
            "regular" => Ok(RepKind::Regular),
            _ => match s.strip_prefix("tensor:").map(str::parse::<u64>) {
                Some(Ok(n)) if n >= 1 => Ok(RepKind::Tensor(n)),
                _ => Err(Error::Parse(format!("unknown representation {s:?}"))),
            },
        }
    }
}

impl fmt::Display for RepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepKind::Trivial => f.write_str("trivial"),
            RepKind::Sign => f.write_str("sign"),
            RepKind::Regular => f.write_str("regular"),
            RepKind::Tensor(n) => write!(f, "tensor:{n}"),
        }
    }
}

/// Matrices `r((i j))` for all transpositions of `S_q`, points `0..q`.
#[derive(Clone, Debug)]
pub struct Representation {
    q: usize,
    dim: usize,
    transpositions: HashMap<(usize, usize), IntMatrix>,
}

/// Size limits keeping the explicit matrices small.
pub const MAX_REGULAR_Q: usize = 5;
pub const MAX_TENSOR_DIM: usize = 6561;

impl Representation {
    pub fn new(kind: RepKind, q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidArgument("representations need q >= 2".into()));
        }
        let pairs = (0..q).flat_map(|i| (i + 1..q).map(move |j| (i, j)));
        let transpositions: HashMap<(usize, usize), IntMatrix> = match kind {
            RepKind::Trivial => pairs.map(|p| (p, IntMatrix::identity(1))).collect(),
            RepKind::Sign => pairs
                .map(|p| {
                    let mut m = IntMatrix::zeros(1);
                    m.set(0, 0, -1);
                    (p, m)
                })
                .collect(),
            RepKind::Regular => {
                if q > MAX_REGULAR_Q {
                    return Err(Error::InvalidArgument(format!(
                        "regular representation limited to q <= {MAX_REGULAR_Q}"
                    )));
                }
                let perms = permutations(q);
                let index: HashMap<Vec<usize>, usize> =
                    perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
                pairs
                    .map(|(a, b)| {
                        let mut m = IntMatrix::zeros(perms.len());
                        for (col, sigma) in perms.iter().enumerate() {
                            // (a b) ∘ σ
                            let image: Vec<usize> = sigma.iter().map(|&x| swap_point(x, a, b)).collect();
                            m.set(index[&image], col, 1);
                        }
                        ((a, b), m)
                    })
                    .collect()
            }
            RepKind::Tensor(n) => {
                let dim = (n as usize).checked_pow(q as u32).filter(|&d| d <= MAX_TENSOR_DIM).ok_or_else(|| {
                    Error::InvalidArgument(format!("N^q exceeds {MAX_TENSOR_DIM}"))
                })?;
                let n = n as usize;
                pairs
                    .map(|(a, b)| {
                        let mut m = IntMatrix::zeros(dim);
                        for col in 0..dim {
                            let mut digits = to_digits(col, n, q);
                            digits.swap(a, b);
                            m.set(from_digits(&digits, n), col, 1);
                        }
                        ((a, b), m)
                    })
                    .collect()
            }
        };
        Representation::from_matrices(q, transpositions)
    }

    /// A representation given by its transposition matrices, checked
    /// against the defining relations of `S_q`.
    pub fn from_matrices(q: usize, transpositions: HashMap<(usize, usize), IntMatrix>) -> Result<Self> {
        let dim = transpositions.values().next().map(IntMatrix::size).unwrap_or(0);
        let rep = Representation { q, dim, transpositions };
        rep.check_relations()?;
        Ok(rep)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `r((i j))`, points `0..q`, `i ≠ j`.
    pub fn transposition(&self, i: usize, j: usize) -> &IntMatrix {
        &self.transpositions[&(i.min(j), i.max(j))]
    }

    /// Checks `r(t)² = 1`, `r(t)r(t)ᵀ = 1`, the braid relation
    /// `r(ij) r(jk) r(ij) = r(ik)` and commutation of disjoint
    /// transpositions.
    pub fn check_relations(&self) -> Result<()> {
        let q = self.q;
        let fail = |what: String| Err(Error::InvalidRepresentation(what));
        for i in 0..q {
            for j in i + 1..q {
                let Some(t) = self.transpositions.get(&(i, j)) else {
                    return fail(format!("missing matrix for ({} {})", i + 1, j + 1));
                };
                if t.size() != self.dim {
                    return fail(format!("matrix for ({} {}) has the wrong size", i + 1, j + 1));
                }
            }
        }
        let id = IntMatrix::identity(self.dim);
        for i in 0..q {
            for j in i + 1..q {
                let t = self.transposition(i, j);
                if t.mul(t) != id {
                    return fail(format!("r(({} {}))² ≠ 1", i + 1, j + 1));
                }
                if t.mul(&t.transpose()) != id {
                    return fail(format!("r(({} {})) is not orthogonal", i + 1, j + 1));
                }
                for k in 0..q {
                    if k == i || k == j {
                        continue;
                    }
                    let lhs = t.mul(self.transposition(j, k)).mul(t);
                    if &lhs != self.transposition(i, k) {
                        return fail(format!("braid relation fails for {}, {}, {}", i + 1, j + 1, k + 1));
                    }
                    for l in k + 1..q {
                        if l == i || l == j {
                            continue;
                        }
                        let s = self.transposition(k, l);
                        if t.mul(s) != s.mul(t) {
                            return fail("disjoint transpositions do not commute".to_string());
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix of a representative of the class `ρ`, each cycle realized on
    /// consecutive points as a product of adjacent transpositions.
    pub fn class_matrix(&self, rho: &CycleType) -> Result<IntMatrix> {
        if rho.q() != self.q {
            return Err(Error::SizeMismatch(format!("ρ ∈ S_{} but the representation is of S_{}", rho.q(), self.q)));
        }
        let mut m = IntMatrix::identity(self.dim);
        let mut start = 0;
        for len in rho.nontrivial() {
            for p in start..start + len as usize - 1 {
                m = m.mul(self.transposition(p, p + 1));
            }
            start += len as usize;
        }
        Ok(m)
    }

    /// The normalized character `Tr r(ρ) / dim` as a central function.
    pub fn central_function(&self) -> Result<CentralFunction> {
        let mut values = BTreeMap::new();
        for rho in CycleType::all(self.q) {
            let tr = self.class_matrix(&rho)?.trace();
            values.insert(rho, BigRational::new(BigInt::from(tr), BigInt::from(self.dim)));
        }
        Ok(CentralFunction::Table { q: self.q, values })
    }
}

fn swap_point(x: usize, a: usize, b: usize) -> usize {
    if x == a {
        b
    } else if x == b {
        a
    } else {
        x
    }
}

fn permutations(q: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; q], &mut out);
    out
}

fn to_digits(mut x: usize, base: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for slot in d.iter_mut() {
        *slot = x % base;
        x /= base;
    }
    d
}

fn from_digits(d: &[usize], base: usize) -> usize {
    d.iter().rev().fold(0, |acc, &x| acc * base + x)
}

/// The state on the representation space paired with `Γ`.
#[derive(Clone, Debug, PartialEq)]
pub enum GammaState {
    /// `Tr(·) / dim`.
    NormalizedTrace,
    /// `Σ_i w_i A_ii` with `Σ w_i = 1`.
    Diagonal(Vec<BigRational>),
}

/// The `(q+1)·dim` square matrix `Γ(r)`.
pub fn gamma_matrix(rep: &Representation) -> IntMatrix {
    let (q, d) = (rep.q, rep.dim);
    let mut g = IntMatrix::zeros((q + 1) * d);
    for a in 0..=q {
        for b in 0..=q {
            if a == b {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    let v = if a == 0 || b == 0 {
                        i128::from(i == j)
                    } else {
                        rep.transposition(a - 1, b - 1).get(i, j)
                    };
                    g.set(a * d + i, b * d + j, v);
                }
            }
        }
    }
    g
}

/// `m_k = (state ⊗ block average)(Γ^k)`, `k = 1..=n`, exact.
pub fn gamma_moments(rep: &Representation, state: &GammaState, n: usize) -> Result<MomentSequence<BigRational>> {
    let (q, d) = (rep.q, rep.dim);
    if let GammaState::Diagonal(w) = state {
        if w.len() != d {
            return Err(Error::SizeMismatch(format!("{} weights for dimension {d}", w.len())));
        }
        if !w.iter().sum::<BigRational>().is_one() {
            return Err(Error::InvalidArgument("state weights must sum to 1".into()));
        }
    }
    let g = gamma_matrix(rep);
    let mut power = g.clone();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        if k > 1 {
            power = power.mul(&g);
        }
        // diagonal of the block average, entry i
        let diag = |i: usize| -> i128 { (0..=q).map(|a| power.get(a * d + i, a * d + i)).sum() };
        let value = match state {
            GammaState::NormalizedTrace => {
                let t: i128 = (0..d).map(diag).sum();
                BigRational::new(BigInt::from(t), BigInt::from(((q + 1) * d) as u64))
            }
            GammaState::Diagonal(w) => {
                let s = (0..d).fold(BigRational::zero(), |acc, i| acc + &w[i] * BigInt::from(diag(i)));
                s / BigInt::from(q as u64 + 1)
            }
        };
        out.push(value);
    }
    Ok(MomentSequence::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::int;
    use crate::symmetric_group::central::tensor_trace;

    #[test]
    fn trivial_rep_q2() {
        let rep = Representation::new(RepKind::Trivial, 2).unwrap();
        let m = gamma_moments(&rep, &GammaState::NormalizedTrace, 4).unwrap();
        assert_eq!(m.values, vec![int(0), int(2), int(2), int(6)]);
        // eigenvalues {2, −1, −1}
        for k in 1..=4 {
            let expected = BigRational::new(BigInt::from(2i64.pow(k as u32) + 2 * (-1i64).pow(k as u32)), BigInt::from(3));
            assert_eq!(m.get(k), expected);
        }
    }

    #[test]
    fn sign_rep_q2() {
        let rep = Representation::new(RepKind::Sign, 2).unwrap();
        let g = gamma_matrix(&rep);
        let expected = [[0, 1, 1], [1, 0, -1], [1, -1, 0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.get(i, j), expected[i][j]);
            }
        }
        let m = gamma_moments(&rep, &GammaState::NormalizedTrace, 2).unwrap();
        assert_eq!(m.get(2), int(2));
    }

    #[test]
    fn builtin_reps_satisfy_relations_and_characters() {
        for q in 2..=4 {
            for kind in [RepKind::Trivial, RepKind::Sign, RepKind::Regular, RepKind::Tensor(2), RepKind::Tensor(3)] {
                let rep = Representation::new(kind, q).unwrap();
                let psi = rep.central_function().unwrap();
                for rho in CycleType::all(q) {
                    let v = psi.eval(&rho).unwrap();
                    let expected = match kind {
                        RepKind::Trivial => int(1),
                        RepKind::Sign => int(if rho.length() % 2 == 0 { 1 } else { -1 }),
                        RepKind::Regular => int(i64::from(rho.length() == 0)),
                        RepKind::Tensor(n) => tensor_trace(n, &rho),
                    };
                    assert_eq!(v, expected, "{kind} q={q} ρ={rho}");
                }
            }
        }
    }

    #[test]
    fn broken_relations_are_rejected() {
        let mut ts = HashMap::new();
        let mut bad = IntMatrix::identity(2);
        bad.set(0, 1, 1);
        ts.insert((0, 1), bad);
        assert!(matches!(Representation::from_matrices(2, ts), Err(Error::InvalidRepresentation(_))));
        // 2x2 matrices that square to 1 but violate the braid relation in S_3
        let swap = {
            let mut m = IntMatrix::zeros(2);
            m.set(0, 1, 1);
            m.set(1, 0, 1);
            m
        };
        let mut ts = HashMap::new();
        ts.insert((0, 1), swap.clone());
        ts.insert((1, 2), swap.clone());
        ts.insert((0, 2), IntMatrix::identity(2));
        assert!(Representation::from_matrices(3, ts).is_err());
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("tensor:3".parse::<RepKind>().unwrap(), RepKind::Tensor(3));
        assert_eq!("regular".parse::<RepKind>().unwrap().to_string(), "regular");
        assert!("tensor:x".parse::<RepKind>().is_err());
    }

    #[test]
    fn diagonal_state_with_uniform_weights_is_trace() {
        let rep = Representation::new(RepKind::Regular, 3).unwrap();
        let w = vec![BigRational::new(BigInt::one(), BigInt::from(6)); 6];
        let a = gamma_moments(&rep, &GammaState::Diagonal(w), 5).unwrap();
        let b = gamma_moments(&rep, &GammaState::NormalizedTrace, 5).unwrap();
        assert_eq!(a, b);
    }
}
