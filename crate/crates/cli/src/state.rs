use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use young_calculus::diagram::Partition;
use young_calculus::numeric::rational::parse_rational;
use young_calculus::symmetric_group::{CentralFunction, CycleType, GradedTensorState, RepKind, Representation};
use young_calculus::{Error, Result};

fn rationals(s: &str) -> Result<Vec<BigRational>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| parse_rational(t.trim())).collect()
}

/// `EVEN|ODD`, comma-separated eigenvalues on each part, e.g. `1/2,1/4|1/4`.
pub fn parse_graded(s: &str) -> Result<GradedTensorState> {
    let (even, odd) = s.split_once('|').unwrap_or((s, ""));
    GradedTensorState::new(rationals(even)?, rationals(odd)?)
}

/// A central function on `S_q` from its command-line description:
/// `trivial`, `sign`, `plancherel`, `tensor:N`, `character:λ`,
/// `graded:EVEN|ODD` or `rep:KIND`.
pub fn parse_state(s: &str, q: usize) -> Result<CentralFunction> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let f = match kind {
        "trivial" => CentralFunction::Trivial(q),
        "sign" => CentralFunction::Sign(q),
        "plancherel" => {
            let values: BTreeMap<CycleType, BigRational> = CycleType::all(q)
                .into_iter()
                .map(|rho| {
                    let v = if rho.length() == 0 { BigRational::one() } else { BigRational::zero() };
                    (rho, v)
                })
                .collect();
            CentralFunction::Table { q, values }
        }
        "tensor" => {
            let n: u64 = arg.parse().map_err(|_| Error::Parse(format!("bad N in {s:?}")))?;
            if n == 0 {
                return Err(Error::InvalidArgument("N must be positive".into()));
            }
            CentralFunction::TensorTrace { q, n }
        }
        "character" => {
            let lambda: Partition = arg.parse()?;
            if lambda.size() != q {
                return Err(Error::SizeMismatch(format!("{lambda} is not a partition of {q}")));
            }
            CentralFunction::Character(lambda)
        }
        "graded" => CentralFunction::Graded { q, state: parse_graded(arg)? },
        "rep" => Representation::new(arg.parse::<RepKind>()?, q)?.central_function()?,
        _ => return Err(Error::Parse(format!("unknown state {s:?}"))),
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_states() {
        assert_eq!(parse_state("tensor:3", 4).unwrap(), CentralFunction::TensorTrace { q: 4, n: 3 });
        assert_eq!(parse_state("sign", 3).unwrap(), CentralFunction::Sign(3));
        assert!(parse_state("character:2,1", 4).is_err());
        assert!(parse_state("nonsense", 4).is_err());
        let g = parse_graded("1/2,1/4|1/4").unwrap();
        assert_eq!(g.even().len(), 2);
        assert_eq!(g.odd().len(), 1);
        assert!(parse_graded("1/2|1/4").is_err());
        let psi = parse_state("plancherel", 3).unwrap();
        assert_eq!(psi.eval(&CycleType::transposition(3)).unwrap(), BigRational::zero());
    }
}
