//! The integer scalar behind exact circle arithmetic.
//!
//! Rotation codings are generic over any signed integer type with checked
//! arithmetic. Fixed-width types (`i64`, `i128`) are fast and report
//! [`Error::Overflow`](crate::Error::Overflow) when a comparison needs more
//! precision than they hold; `BigInt` never overflows.

use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Signed, ToPrimitive};

use crate::error::{Error, Result};

pub trait Scalar:
    Integer
    + Signed
    + Clone
    + Debug
    + Display
    + FromPrimitive
    + ToPrimitive
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Integer
        + Signed
        + Clone
        + Debug
        + Display
        + FromPrimitive
        + ToPrimitive
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + Send
        + Sync
        + 'static
{
}

pub type Rational<T> = Ratio<T>;

pub(crate) fn mul<T: Scalar>(a: &T, b: &T) -> Result<T> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub(crate) fn add<T: Scalar>(a: &T, b: &T) -> Result<T> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub(crate) fn from_i64<T: Scalar>(v: i64) -> Result<T> {
    T::from_i64(v).ok_or(Error::Overflow)
}

pub(crate) fn from_u64<T: Scalar>(v: u64) -> Result<T> {
    T::from_u64(v).ok_or(Error::Overflow)
}

/// Parse `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational<T: Scalar>(s: &str) -> Result<Rational<T>> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = T::from_str_radix(num, 10).map_err(|_| bad())?;
    let d = T::from_str_radix(den, 10).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Ratio::new(n, d))
}

pub fn format_rational<T: Scalar>(r: &Rational<T>) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn ratio_to_f64<T: Scalar>(r: &Rational<T>) -> f64 {
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn parses_rationals() {
        let r: Rational<i128> = parse_rational("-6/4").unwrap();
        assert_eq!(r, Ratio::new(-3, 2));
        assert_eq!(format_rational(&r), "-3/2");
        let b: Rational<BigInt> = parse_rational("7").unwrap();
        assert_eq!(format_rational(&b), "7");
        assert!(parse_rational::<i64>("1/0").is_err());
        assert!(parse_rational::<i64>("x").is_err());
    }

    #[test]
    fn checked_ops_report_overflow() {
        assert_eq!(mul(&i64::MAX, &2i64), Err(Error::Overflow));
        assert_eq!(add(&1i64, &2i64), Ok(3));
    }
}
