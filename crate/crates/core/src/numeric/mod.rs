//! Numerical helpers shared by the measure and limit-shape code.

pub mod quadrature;
pub mod rational;

pub use num_complex::Complex64;

/// Formats `x` with `digits` significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        let s = format!("{:.*e}", digits.saturating_sub(1), x);
        let (mantissa, e) = s.split_once('e').unwrap_or((&s, "0"));
        return format!("{}e{}", trim_zeros(mantissa), e);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    let s = trim_zeros(&s);
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

use num_rational::BigRational;
use num_traits::Num;

/// Field elements the moment/cumulant algebra runs over: `f64` for
/// numerical pipelines, `BigRational` for exact checks.
pub trait Scalar: Clone + Num + std::fmt::Debug + Send + Sync + 'static {
    const EXACT: bool;
    fn to_f64(&self) -> f64;
    fn from_i64(v: i64) -> Self;
    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Option<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        v.as_f64()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }
    fn from_i64(v: i64) -> Self {
        rational::int(v)
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(rational::format_rational(self))
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        match v {
            serde_json::Value::String(s) => rational::parse_rational(s).ok(),
            serde_json::Value::Number(n) => rational::parse_rational(&n.to_string()).ok(),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fmt_sig;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(4.0 / std::f64::consts::PI, 12), "1.27323954474");
        assert_eq!(fmt_sig(-2.5, 12), "-2.5");
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(1e-9, 12), "1e-9");
        assert_eq!(fmt_sig(123456.0, 12), "123456");
    }
}
