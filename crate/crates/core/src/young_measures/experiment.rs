use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::rsk::{sample_measure, sample_plancherel, sample_schur_weyl};
use super::weights::{decompose_central_function, plancherel_weights, schur_weyl_weights, YoungMeasure};
use crate::diagram::{coords_to_profile, partition_to_coords, sup_distance, ContinuousDiagram, Partition};
use crate::error::{Error, Result};
use crate::limit_shapes::{p_c_diagram, ScalingParam};
use crate::markov_krein::coords_moments;
use crate::numeric::fmt_sig;
use crate::numeric::rational::{format_rational, to_f64};
use crate::symmetric_group::{graded_state_value, CentralFunction, CycleType, GradedTensorState};

/// Largest `q` for which exhaustive weights are computed alongside the
/// Monte Carlo estimate.
pub const EXACT_MAX_Q: usize = 30;

/// Grid used for `P_c` when measuring profile distances.
pub const PROFILE_GRID: usize = 8192;

/// Where the random diagrams come from.
#[derive(Clone, Debug, PartialEq)]
pub enum Source {
    /// RSK shapes of uniform words, law `Π_q` of `(ℂ^N)^{⊗q}`.
    SchurWeyl { q: usize, n: u64 },
    /// RSK shapes of uniform permutations.
    Plancherel { q: usize },
    /// The graded tensor state, drawn from its exact decomposition.
    Graded { q: usize, state: GradedTensorState },
}

impl Source {
    pub fn q(&self) -> usize {
        match self {
            Source::SchurWeyl { q, .. } | Source::Plancherel { q } | Source::Graded { q, .. } => *q,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Source::SchurWeyl { q, n } => format!("schur-weyl(q={q},N={n})"),
            Source::Plancherel { q } => format!("plancherel(q={q})"),
            Source::Graded { q, state } => CentralFunction::Graded { q: *q, state: state.clone() }.describe(),
        }
    }

    /// `c = √q / N`, zero for Plancherel, undefined for graded states.
    pub fn c(&self) -> Option<f64> {
        match self {
            Source::SchurWeyl { q, n } => Some((*q as f64).sqrt() / *n as f64),
            Source::Plancherel { .. } => Some(0.0),
            Source::Graded { .. } => None,
        }
    }

    /// `ψ((1 2))`.
    pub fn transposition_value(&self) -> BigRational {
        match self {
            Source::SchurWeyl { n, .. } => BigRational::new(1.into(), BigInt::from(*n)),
            Source::Plancherel { .. } => BigRational::zero(),
            Source::Graded { q, state } => graded_state_value(state, &CycleType::transposition(*q)),
        }
    }

    /// Exhaustive weights.
    pub fn exact_measure(&self) -> Result<YoungMeasure> {
        match self {
            Source::SchurWeyl { q, n } => schur_weyl_weights(*q, *n),
            Source::Plancherel { q } => plancherel_weights(*q),
            Source::Graded { q, state } => {
                decompose_central_function(&CentralFunction::Graded { q: *q, state: state.clone() })
            }
        }
    }

    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<Partition>> {
        match self {
            Source::SchurWeyl { q, n } => sample_schur_weyl(*q, *n, count, seed),
            Source::Plancherel { q } => sample_plancherel(*q, count, seed),
            Source::Graded { .. } => sample_measure(&self.exact_measure()?, count, seed),
        }
    }
}

/// Distances `‖ω̃_λ − P_c‖_∞` of the rescaled sampled diagrams.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileStats {
    pub c: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub source: String,
    pub q: usize,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub c: Option<f64>,
    pub order: usize,
    pub samples: usize,
    pub seed: u64,
    /// Sample mean of `m_l(λ)`.
    pub mean: f64,
    /// Unbiased sample variance of `m_l(λ)`.
    pub variance: f64,
    /// `variance · q^{−l}`.
    pub ratio: f64,
    /// `m_l(ψ)`, exact, when available.
    pub reference: Option<String>,
    pub exact_variance: Option<String>,
    pub exact_ratio: Option<f64>,
    pub profile: Option<ProfileStats>,
}

impl ExperimentResult {
    pub const CSV_HEADER: &'static str =
        "source,q,N,c,order,samples,seed,mean,variance,ratio,reference,exact_variance,exact_ratio,profile_mean,profile_max";

    pub fn csv_row(&self) -> String {
        let f = |x: f64| fmt_sig(x, 12);
        let opt = |x: Option<f64>| x.map(f).unwrap_or_default();
        [
            self.source.clone(),
            self.q.to_string(),
            self.n.map(|n| n.to_string()).unwrap_or_default(),
            opt(self.c),
            self.order.to_string(),
            self.samples.to_string(),
            self.seed.to_string(),
            f(self.mean),
            f(self.variance),
            f(self.ratio),
            self.reference.clone().unwrap_or_default(),
            self.exact_variance.clone().unwrap_or_default(),
            opt(self.exact_ratio),
            opt(self.profile.as_ref().map(|p| p.mean)),
            opt(self.profile.as_ref().map(|p| p.max)),
        ]
        .map(|s| if s.contains(',') { format!("\"{s}\"") } else { s })
        .join(",")
    }
}

/// `m_l(λ)` exactly.
fn moment_of(lambda: &Partition, l: usize) -> BigRational {
    coords_moments(&partition_to_coords(lambda), l).get(l)
}

/// `‖q^{−1/2} ω_λ(q^{1/2} ·) − target‖_∞`.
pub fn rescaled_distance(lambda: &Partition, target: &ContinuousDiagram) -> f64 {
    let w = coords_to_profile(&partition_to_coords(lambda)).rescale(lambda.size() as u64);
    sup_distance(&w, target)
}

/// Samples diagrams from `source`, records the mean and variance of
/// `m_l(λ)` and the ratio `Var · q^{−l}`. For `q ≤ EXACT_MAX_Q` the exact
/// mean and variance are added; otherwise the reference uses
/// `m_1 = 0`, `m_2 = q`, `m_3 = q(q−1)ψ((1 2))` when `l ≤ 3`. With
/// `profile` set the sup-distance of each rescaled diagram to `P_c` is
/// recorded as well.
pub fn concentration_experiment(source: &Source, l: usize, count: usize, seed: u64, profile: bool) -> Result<ExperimentResult> {
    if l == 0 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    if count < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let q = source.q();
    let shapes = source.sample(count, seed)?;
    let values: Vec<f64> = shapes.par_iter().map(|s| to_f64(&moment_of(s, l))).collect();
    let mean = values.iter().sum::<f64>() / count as f64;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    let scale = (q as f64).powi(l as i32);

    let (mut reference, mut exact_variance, mut exact_ratio) = (None, None, None);
    if q <= EXACT_MAX_Q {
        let m = source.exact_measure()?;
        let moments: Vec<(BigRational, BigRational)> =
            m.masses().iter().map(|(lam, p)| (p.clone(), moment_of(lam, l))).collect();
        let mu: BigRational = moments.iter().map(|(p, v)| p * v).sum();
        let var: BigRational = moments.iter().map(|(p, v)| p * (v - &mu) * (v - &mu)).sum();
        exact_ratio = Some(to_f64(&var) / scale);
        reference = Some(format_rational(&mu));
        exact_variance = Some(format_rational(&var));
    } else if l <= 3 {
        let qq = BigInt::from(q as u64);
        let r = match l {
            1 => BigRational::zero(),
            2 => BigRational::from_integer(qq),
            _ => source.transposition_value() * (&qq * (&qq - 1)),
        };
        reference = Some(format_rational(&r));
    }

    let profile = match (profile, source.c()) {
        (true, Some(c)) => {
            let target = p_c_diagram(ScalingParam::new(c)?, PROFILE_GRID);
            let d: Vec<f64> = shapes.par_iter().map(|s| rescaled_distance(s, &target)).collect();
            Some(ProfileStats {
                c,
                mean: d.iter().sum::<f64>() / count as f64,
                max: d.iter().copied().fold(0.0, f64::max),
            })
        }
        (true, None) => return Err(Error::InvalidArgument("profile distance needs a source with a scaling parameter".into())),
        (false, _) => None,
    };

    Ok(ExperimentResult {
        source: source.describe(),
        q,
        n: match source {
            Source::SchurWeyl { n, .. } => Some(*n),
            _ => None,
        },
        c: source.c(),
        order: l,
        samples: count,
        seed,
        mean,
        variance,
        ratio: variance / scale,
        reference,
        exact_variance,
        exact_ratio,
        profile,
    })
}
