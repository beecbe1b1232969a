//! Approximate factorization on disjoint supports: the minimal constants
//! `c_l` and `δ` with `|ψ(ρ)| ≤ c_l q^{−l/2}` for `|ρ| = l` and
//! `|ψ(ρσ) − ψ(ρ)ψ(σ)| ≤ δ q^{−l/2}` for disjoint `ρ, σ` with `|ρσ| = l`.
//!
//! By centrality it is enough to range over classes: a pair of classes
//! is realized by disjoint permutations exactly when their supports fit
//! in `q` points.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::central::CentralFunction;
use super::cycle::CycleType;
use crate::error::{Error, Result};
use crate::numeric::rational::{format_rational, to_f64};

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub q: usize,
    pub order: usize,
    /// `c_l`, `l = 1..=order`.
    pub c: Vec<f64>,
    /// `max_{|ρ| = l} |ψ(ρ)|`, exact.
    pub max_abs: Vec<String>,
    pub c_witness: Vec<Option<CycleType>>,
    pub delta: f64,
    /// `max |ψ(ρσ) − ψ(ρ)ψ(σ)|` over disjoint pairs with `|ρσ| = l`, exact.
    pub max_defect: Vec<String>,
    pub delta_witness: Option<(CycleType, CycleType)>,
    /// True when every defect vanishes exactly.
    pub delta_is_zero: bool,
}

/// Multisets of cycle lengths `≥ 2` with `Σ(ℓ − 1) ≤ max_len` and
/// `Σ ℓ ≤ max_support`, each in decreasing order; the empty one excluded.
fn nontrivial_classes(max_len: usize, max_support: usize) -> Vec<Vec<u32>> {
    fn go(max_part: u32, len_left: usize, supp_left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for l in (2..=max_part).rev() {
            let (dl, ds) = (l as usize - 1, l as usize);
            if dl <= len_left && ds <= supp_left {
                cur.push(l);
                go(l, len_left - dl, supp_left - ds, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go((max_len + 1).min(max_support) as u32, max_len, max_support, &mut Vec::new(), &mut out);
    out
}

pub fn factorization_check(f: &CentralFunction, n: usize) -> Result<FactorizationReport> {
    let q = f.q();
    if n == 0 || n + 1 > q {
        return Err(Error::OrderTooLarge { order: n, max: q.saturating_sub(1) });
    }
    let classes = nontrivial_classes(n, q);
    let mut values = Vec::with_capacity(classes.len());
    for cycles in &classes {
        let rho = CycleType::from_cycles(cycles, q)?;
        let v = f.eval(&rho)?;
        values.push((rho, v));
    }

    let mut max_abs = vec![BigRational::zero(); n];
    let mut c_witness: Vec<Option<CycleType>> = vec![None; n];
    for (rho, v) in &values {
        let l = rho.length();
        if v.abs() > max_abs[l - 1] || c_witness[l - 1].is_none() {
            max_abs[l - 1] = v.abs();
            c_witness[l - 1] = Some(rho.clone());
        }
    }

    let mut max_defect = vec![BigRational::zero(); n];
    let mut defect_witness: Vec<Option<(CycleType, CycleType)>> = vec![None; n];
    for (i, (a, va)) in values.iter().enumerate() {
        for (b, vb) in values.iter().skip(i) {
            let l = a.length() + b.length();
            if l > n || a.support() + b.support() > q {
                continue;
            }
            let ab = a.disjoint_product(b)?;
            let d = (f.eval(&ab)? - va * vb).abs();
            if d > max_defect[l - 1] {
                max_defect[l - 1] = d;
                defect_witness[l - 1] = Some((a.clone(), b.clone()));
            }
        }
    }

    let scale = |l: usize| (q as f64).powf(l as f64 / 2.0);
    let c = max_abs.iter().enumerate().map(|(i, m)| to_f64(m) * scale(i + 1)).collect();
    let scaled: Vec<f64> = max_defect.iter().enumerate().map(|(i, m)| to_f64(m) * scale(i + 1)).collect();
    let (best, delta) = scaled
        .iter()
        .enumerate()
        .fold((None, 0.0), |(bi, bv), (i, &v)| if v > bv { (Some(i), v) } else { (bi, bv) });
    Ok(FactorizationReport {
        q,
        order: n,
        c,
        max_abs: max_abs.iter().map(format_rational).collect(),
        c_witness,
        delta,
        max_defect: max_defect.iter().map(format_rational).collect(),
        delta_witness: best.and_then(|i| defect_witness[i].clone()),
        delta_is_zero: max_defect.iter().all(Zero::is_zero),
    })
}
