//! Helpers for exact rational scalars: parsing, formatting, and safe
//! conversion to floating point.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Parses a rational written as `p` or `p/q` with an optional leading minus.
/// Decimal notation is rejected so inexact values can never sneak in.
pub fn parse_rational(text: &str, path: &str) -> Result<Rat> {
    let bad = || Error::NonRational {
        path: path.to_string(),
        text: text.to_string(),
    };
    let (num_str, den_str) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let parse_int = |s: &str, allow_sign: bool| -> Result<BigInt> {
        let digits = if allow_sign {
            s.strip_prefix('-').unwrap_or(s)
        } else {
            s
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse::<BigInt>().map_err(|_| bad())
    };
    let num = parse_int(num_str, true)?;
    let den = match den_str {
        Some(d) => parse_int(d, false)?,
        None => BigInt::from(1),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(num, den))
}

/// Formats a rational as `p` or `p/q` (reduced, denominator positive).
pub fn format_rational(r: &Rat) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Converts a rational to `f64`, correct to a few ulps even when numerator
/// and denominator are far outside the `f64` range.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let numer = r.numer();
    let denom = r.denom();
    if numer.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (numer.to_f64(), denom.to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            let q = n / d;
            if q.is_finite() {
                return q;
            }
        }
    }
    let neg = numer.sign() == Sign::Minus;
    let n = numer.abs();
    let d = denom.clone();
    // n/d is within [2^(e-1), 2^(e+1)]; extract ~64 significant bits.
    let e = n.bits() as i64 - d.bits() as i64;
    let q = if 64 - e >= 0 {
        (n << (64 - e) as u64) / d
    } else {
        n / (d << (e - 64) as u64)
    };
    let qf = q.to_f64().unwrap_or(f64::INFINITY);
    let val = qf * 2f64.powi((e - 64).clamp(i32::MIN as i64, i32::MAX as i64) as i32);
    if neg {
        -val
    } else {
        val
    }
}

/// Positive content of a nonempty list of rationals: gcd of numerators over
/// lcm of denominators, so dividing through leaves coprime integer entries.
pub fn content<'a>(values: impl Iterator<Item = &'a Rat>) -> Rat {
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::from(1);
    for v in values {
        num_gcd = num_gcd.gcd(&v.numer().abs());
        den_lcm = den_lcm.lcm(v.denom());
    }
    if num_gcd.is_zero() {
        Rat::zero()
    } else {
        Rat::new(num_gcd, den_lcm)
    }
}
