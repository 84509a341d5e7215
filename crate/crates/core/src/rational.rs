//! Arbitrary-precision rationals and the small helpers the rest of the crate
//! leans on.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Error;

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Builds `num/den` from machine integers.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn half() -> Rational {
    rat(1, 2)
}

/// Fractional part in `[0, 1)`, also for negative inputs.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn min_r(a: &Rational, b: &Rational) -> Rational {
    if a <= b { a.clone() } else { b.clone() }
}

pub fn max_r(a: &Rational, b: &Rational) -> Rational {
    if a >= b { a.clone() } else { b.clone() }
}

/// `2^-k` exactly.
pub fn pow2_inv(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k as usize)
}

/// Parses `"p/q"`, `"-p/q"` or a bare integer `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(alloc::format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Renders as `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        alloc::format!("{}", x.numer())
    } else {
        alloc::format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal rendering with exactly `digits` digits after the point, rounded
/// half away from zero. This is an approximation for display only.
pub fn to_decimal(x: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), digits);
    let scaled = x.abs() * Rational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let mut q = q;
    if r * BigInt::from(2u32) >= *scaled.denom() {
        q += 1u32;
    }
    let (int_part, frac_part) = q.div_rem(&scale);
    let mut out = String::new();
    if x.is_negative() && !(int_part.is_zero() && frac_part.is_zero()) {
        out.push('-');
    }
    let _ = write!(out, "{int_part}");
    if digits > 0 {
        let f = alloc::format!("{frac_part}");
        out.push('.');
        for _ in f.len()..digits {
            out.push('0');
        }
        out.push_str(&f);
    }
    out
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Rational approximation of a finite float with the given power-of-two
/// denominator. Used only to build display grids; never in a functional.
pub fn from_f64_dyadic(x: f64, bits: u32) -> Rational {
    let scale = (1u64 << bits) as f64;
    let n = libm::round(x * scale) as i64;
    Rational::new(BigInt::from(n), BigInt::one() << bits as usize)
}


/// Sorts and removes duplicates.
pub fn sort_dedup(v: &mut Vec<Rational>) {
    v.sort();
    v.dedup();
}

pub fn is_integer(x: &Rational) -> bool {
    x.denom().is_one()
}

pub fn sign(x: &Rational) -> Sign {
    x.numer().sign()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -7/21 ").unwrap(), rat(-1, 3));
        assert_eq!(parse_rational("5").unwrap(), int(5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert_eq!(fmt_rational(&rat(6, 8)), "3/4");
        assert_eq!(fmt_rational(&int(-2)), "-2");
    }

    #[test]
    fn frac_wraps_negatives() {
        assert_eq!(frac(&rat(-1, 8)), rat(7, 8));
        assert_eq!(frac(&rat(9, 4)), rat(1, 4));
        assert_eq!(frac(&int(3)), zero());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(1, 3), 5), "0.33333");
        assert_eq!(to_decimal(&rat(2, 3), 3), "0.667");
        assert_eq!(to_decimal(&rat(-1, 8), 2), "-0.13");
        assert_eq!(to_decimal(&int(4), 2), "4.00");
        assert_eq!(to_decimal(&rat(3, 16), 20), "0.18750000000000000000");
    }
}
