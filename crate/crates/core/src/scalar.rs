//! Scalar abstraction shared by the certifier, tree weights, projections and
//! the simplex solver.
//!
//! Everything that has to decide a strict inequality (certificates, LP
//! uniqueness, the decomposition identities) is meant to run on
//! [`Rational`]. The floating point impls exist for fast sweeps where only an
//! approximate verdict is needed.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, the exact scalar of the crate.
pub type Rational = BigRational;

pub trait Scalar:
    Num + Signed + Clone + Debug + Display + PartialOrd + Send + Sync + 'static
{
    /// True when arithmetic on this type is exact.
    const EXACT: bool;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_rational(value: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Sign of the value. Floating point types treat values within a small
    /// tolerance of zero as zero.
    fn sign(&self) -> Ordering;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn is_positive_strict(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    fn is_negative_strict(&self) -> bool {
        self.sign() == Ordering::Less
    }

    fn is_zero_approx(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    /// Rendering used in reports. Rationals are always written as `p/q`.
    fn to_exact_string(&self) -> String {
        self.to_string()
    }

    /// Total order helper for sorting; incomparable values (NaN) sort equal.
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_rational(value: &Rational) -> Self {
        value.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sign(&self) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    fn to_exact_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_ratio(numer: i64, denom: i64) -> Self {
                numer as $t / denom as $t
            }

            fn from_rational(value: &Rational) -> Self {
                ToPrimitive::to_f64(value).unwrap_or(f64::NAN) as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn sign(&self) -> Ordering {
                if self.abs() <= $tol {
                    Ordering::Equal
                } else if *self > 0.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    };
}

float_scalar!(f64, 1e-12);
float_scalar!(f32, 1e-6);

/// Parses a rational written as `p/q`, an integer, or a plain decimal such as
/// `-2.197225`. Decimals are converted exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if s.contains('/') {
        let value = Rational::from_str(s).map_err(|_| bad())?;
        return Ok(value);
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let numer = BigInt::from_str_radix(&digits, 10).map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = Rational::new(numer, denom);
        return Ok(if negative { -value } else { value });
    }
    let numer = BigInt::from_str(s).map_err(|_| bad())?;
    Ok(Rational::from_integer(numer))
}

/// Rounds `value` to the nearest multiple of `1/denom` (ties away from zero).
pub fn quantize(value: f64, denom: u64) -> Result<Rational> {
    if !value.is_finite() {
        return Err(Error::invalid(format!(
            "cannot quantize non-finite value {value}"
        )));
    }
    if denom == 0 {
        return Err(Error::invalid("quantization denominator must be positive"));
    }
    let scaled = (value * denom as f64).round();
    let numer = BigInt::from_f64(scaled)
        .ok_or_else(|| Error::invalid(format!("cannot quantize {value}")))?;
    Ok(Rational::new(numer, BigInt::from(denom)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("3/2").unwrap(), Rational::from_ratio(3, 2));
        assert_eq!(parse_rational("-4").unwrap(), Rational::from_ratio(-4, 1));
        assert_eq!(parse_rational("2.25").unwrap(), Rational::from_ratio(9, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::from_ratio(-1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn quantizes_ln9() {
        let q = quantize(9f64.ln(), 1_000_000).unwrap();
        assert_eq!(q, Rational::from_ratio(2_197_225, 1_000_000));
    }

    #[test]
    fn exact_string_always_has_denominator() {
        assert_eq!(Rational::from_ratio(3, 1).to_exact_string(), "3/1");
        assert_eq!(Rational::from_ratio(-6, 4).to_exact_string(), "-3/2");
    }

    #[test]
    fn float_sign_uses_tolerance() {
        assert_eq!(1e-15f64.sign(), Ordering::Equal);
        assert_eq!((-0.25f64).sign(), Ordering::Less);
    }
}
