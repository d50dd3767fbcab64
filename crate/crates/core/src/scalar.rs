//! Coefficient field abstraction.
//!
//! Two instantiations exist: `f64` for large-scale evaluation and
//! [`Rational`] (arbitrary precision, always in lowest terms) for exact
//! construction checks.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when ring identities hold exactly.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
    fn to_f64(&self) -> f64;
    /// Absolute value as a float, used for pruning and tolerances.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
    /// Parses `"p/q"`, integers and decimal literals.
    fn parse(s: &str) -> Result<Self>;
    fn to_json(&self) -> serde_json::Value;

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Number(n) => Self::parse(&n.to_string()),
            serde_json::Value::String(s) => Self::parse(s),
            other => Err(Error::Parse(format!("expected a number or \"p/q\" string, got {other}"))),
        }
    }

    fn factorial(k: u32) -> Self {
        (1..=k as i64).fold(Self::one(), |acc, j| acc * Self::from_i64(j))
    }

    fn powi(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = out * self.clone();
        }
        out
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q: f64 = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            return Ok(p / q);
        }
        s.parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
    fn powi(&self, e: u32) -> Self {
        f64::powi(*self, e as i32)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }
    fn parse(s: &str) -> Result<Self> {
        parse_rational(s.trim())
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }
}

/// `"p/q"` for non-integers, `"p"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_bigint(s: &str, whole: &str) -> Result<BigInt> {
    BigInt::from_str(s).map_err(|_| Error::Parse(format!("not a rational: {whole:?}")))
}

fn parse_rational(s: &str) -> Result<Rational> {
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p.trim())?;
        let q = parse_rational(q.trim())?;
        if Zero::is_zero(&q) {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(p / q);
    }
    // decimal literal, optionally with exponent: exact conversion
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("not a rational: {s:?}")));
    }
    let all = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(parse_bigint(if all.is_empty() { "0" } else { &all }, s)?);
    let scale = exp - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Ok(if neg { -value } else { value })
}

/// Convenience constructor used throughout the tests.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(Rational::parse("7/10").unwrap(), q(7, 10));
        assert_eq!(Rational::parse("0.7").unwrap(), q(7, 10));
        assert_eq!(Rational::parse("-2.25").unwrap(), q(-9, 4));
        assert_eq!(Rational::parse("1e-3").unwrap(), q(1, 1000));
        assert_eq!(Rational::parse("12").unwrap(), q(12, 1));
        assert_eq!(Rational::parse("4/-6").unwrap(), q(-2, 3));
        assert!(Rational::parse("1/0").is_err());
        assert!(Rational::parse("abc").is_err());
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = q(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(r.to_json(), serde_json::json!("-3/2"));
    }

    #[test]
    fn float_parsing_accepts_fractions() {
        assert_eq!(f64::parse("1/4").unwrap(), 0.25);
        assert_eq!(f64::parse(" 2.5 ").unwrap(), 2.5);
        assert_eq!(f64::from_json(&serde_json::json!(3)).unwrap(), 3.0);
    }

    #[test]
    fn factorial_and_powers() {
        assert_eq!(Rational::factorial(5), q(120, 1));
        assert_eq!(f64::factorial(0), 1.0);
        assert_eq!(q(2, 3).powi(3), q(8, 27));
    }
}
