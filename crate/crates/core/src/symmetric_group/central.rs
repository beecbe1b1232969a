use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::character::normalized_character;
use super::cycle::CycleType;
use crate::diagram::Partition;
use crate::error::{Error, Result};
use crate::numeric::rational::format_rational;

/// `N^{−|ρ|}`, the normalized trace of `ρ` acting on `(ℂ^N)^{⊗q}` by
/// permuting tensor factors.
pub fn tensor_trace(n: u64, rho: &CycleType) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(n).pow(rho.length() as u32))
}

/// The product state `τ^{⊗q}` of a density operator `T` on a
/// `ℤ/2`-graded space `H_0 ⊕ H_1`, given by the eigenvalues of `T` on
/// each part.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedTensorState {
    even: Vec<BigRational>,
    odd: Vec<BigRational>,
}

impl GradedTensorState {
    /// Eigenvalues must be non-negative with total 1.
    pub fn new(mut even: Vec<BigRational>, mut odd: Vec<BigRational>) -> Result<Self> {
        if even.iter().chain(&odd).any(|t| t.is_negative()) {
            return Err(Error::InvalidArgument("eigenvalues must be non-negative".into()));
        }
        let total: BigRational = even.iter().chain(&odd).sum();
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!(
                "eigenvalues must sum to 1, got {}",
                format_rational(&total)
            )));
        }
        even.sort_unstable_by(|a, b| b.cmp(a));
        odd.sort_unstable_by(|a, b| b.cmp(a));
        Ok(GradedTensorState { even, odd })
    }

    /// The normalized trace on an `N`-dimensional even space.
    pub fn uniform(n: u64) -> Self {
        let t = BigRational::new(BigInt::one(), BigInt::from(n));
        GradedTensorState { even: vec![t; n as usize], odd: Vec::new() }
    }

    pub fn even(&self) -> &[BigRational] {
        &self.even
    }

    pub fn odd(&self) -> &[BigRational] {
        &self.odd
    }

    /// `p_n = Σ_j t_{j,0}^n − Σ_j (−t_{j,1})^n`.
    pub fn p(&self, n: u32) -> BigRational {
        let pow = |t: &BigRational| num_traits::pow(t.clone(), n as usize);
        let even: BigRational = self.even.iter().map(pow).sum();
        let odd: BigRational = self.odd.iter().map(|t| pow(&-t.clone())).sum();
        even - odd
    }
}

/// `τ^{⊗q}(ρ) = ∏ p_{ℓ}` over the cycles of `ρ` of length `ℓ ≥ 2`.
pub fn graded_state_value(g: &GradedTensorState, rho: &CycleType) -> BigRational {
    rho.nontrivial().into_iter().map(|l| g.p(l)).fold(BigRational::one(), |acc, v| acc * v)
}

/// A normalized central function `ψ` on `S_q`, evaluated exactly on
/// conjugacy classes.
#[derive(Clone, Debug, PartialEq)]
pub enum CentralFunction {
    /// `N^{−|ρ|}`.
    TensorTrace { q: usize, n: u64 },
    /// `∏ p_{|c|+1}` over non-trivial cycles.
    Graded { q: usize, state: GradedTensorState },
    /// A normalized irreducible character `χ_λ`.
    Character(Partition),
    /// `ψ ≡ 1`.
    Trivial(usize),
    /// `(−1)^{|ρ|}`.
    Sign(usize),
    /// Values given class by class; classes not listed are rejected.
    Table { q: usize, values: BTreeMap<CycleType, BigRational> },
}

impl CentralFunction {
    pub fn q(&self) -> usize {
        match self {
            CentralFunction::TensorTrace { q, .. }
            | CentralFunction::Graded { q, .. }
            | CentralFunction::Table { q, .. } => *q,
            CentralFunction::Character(l) => l.size(),
            CentralFunction::Trivial(q) | CentralFunction::Sign(q) => *q,
        }
    }

    pub fn eval(&self, rho: &CycleType) -> Result<BigRational> {
        if rho.q() != self.q() {
            return Err(Error::SizeMismatch(format!("ρ ∈ S_{} but ψ is on S_{}", rho.q(), self.q())));
        }
        Ok(match self {
            CentralFunction::TensorTrace { n, .. } => tensor_trace(*n, rho),
            CentralFunction::Graded { state, .. } => graded_state_value(state, rho),
            CentralFunction::Character(l) => normalized_character(l, rho)?,
            CentralFunction::Trivial(_) => BigRational::one(),
            CentralFunction::Sign(_) => {
                if rho.length().is_multiple_of(2) {
                    BigRational::one()
                } else {
                    -BigRational::one()
                }
            }
            CentralFunction::Table { values, .. } => values
                .get(rho)
                .cloned()
                .ok_or_else(|| Error::InvalidArgument(format!("no value for class {rho}")))?,
        })
    }

    /// Checks `ψ(e) = 1`.
    pub fn check_normalized(&self) -> Result<()> {
        let e = self.eval(&CycleType::identity(self.q()))?;
        if !e.is_one() {
            return Err(Error::InvalidArgument(format!("ψ(e) = {} ≠ 1", format_rational(&e))));
        }
        Ok(())
    }

    /// A short description for reports.
    pub fn describe(&self) -> String {
        match self {
            CentralFunction::TensorTrace { q, n } => format!("tensor-trace(q={q},N={n})"),
            CentralFunction::Graded { q, state } => format!(
                "graded(q={q},even=[{}],odd=[{}])",
                join(state.even()),
                join(state.odd())
            ),
            CentralFunction::Character(l) => format!("character({l})"),
            CentralFunction::Trivial(q) => format!("trivial(q={q})"),
            CentralFunction::Sign(q) => format!("sign(q={q})"),
            CentralFunction::Table { q, .. } => format!("table(q={q})"),
        }
    }
}

fn join(v: &[BigRational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(",")
}

/// Values of `ψ` on every class, `{"2,1": "1/2", …}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassValues(pub BTreeMap<String, String>);

impl ClassValues {
    pub fn of(f: &CentralFunction) -> Result<Self> {
        let mut out = BTreeMap::new();
        for c in CycleType::all(f.q()) {
            out.insert(c.to_string(), format_rational(&f.eval(&c)?));
        }
        Ok(ClassValues(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational::{int, rat};

    fn ct(s: &str) -> CycleType {
        s.parse().unwrap()
    }

    #[test]
    fn tensor_trace_examples() {
        assert_eq!(tensor_trace(5, &ct("1,1,1")), int(1));
        assert_eq!(tensor_trace(2, &ct("2")), rat(1, 2));
        assert_eq!(tensor_trace(3, &ct("3,2")), rat(1, 27));
    }

    #[test]
    fn graded_examples() {
        for n in [1u64, 2, 3, 5] {
            let g = GradedTensorState::uniform(n);
            for q in 1..=7 {
                for rho in CycleType::all(q) {
                    assert_eq!(graded_state_value(&g, &rho), tensor_trace(n, &rho));
                }
            }
        }
        assert_eq!(graded_state_value(&GradedTensorState::uniform(3), &ct("1,1,1")), int(1));
        let odd = GradedTensorState::new(vec![], vec![int(1)]).unwrap();
        assert_eq!(odd.p(2), int(-1));
        assert_eq!(graded_state_value(&odd, &ct("2,1")), int(-1));
        // purely odd line gives the sign character
        for rho in CycleType::all(6) {
            let sign = if rho.length() % 2 == 0 { 1 } else { -1 };
            assert_eq!(graded_state_value(&odd, &rho), int(sign));
        }
        assert!(GradedTensorState::new(vec![rat(1, 2)], vec![]).unwrap_err().to_string().contains("sum to 1"));
        assert!(GradedTensorState::new(vec![rat(3, 2)], vec![rat(-1, 2)]).is_err());
    }

    #[test]
    fn p_one_is_total_trace() {
        let g = GradedTensorState::new(vec![rat(1, 2), rat(1, 6)], vec![rat(1, 3)]).unwrap();
        assert_eq!(g.p(1), int(1));
        assert_eq!(g.p(2), rat(1, 4) + rat(1, 36) - rat(1, 9));
    }

    #[test]
    fn central_function_dispatch() {
        let f = CentralFunction::TensorTrace { q: 3, n: 2 };
        f.check_normalized().unwrap();
        assert_eq!(f.eval(&ct("2,1")).unwrap(), rat(1, 2));
        assert!(f.eval(&ct("2,2")).is_err());
        assert_eq!(CentralFunction::Sign(3).eval(&ct("2,1")).unwrap(), int(-1));
        let v = ClassValues::of(&CentralFunction::Character("2,1".parse().unwrap())).unwrap();
        assert_eq!(v.0["3"], "-1/2");
    }
}
