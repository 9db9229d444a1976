//! Exact rational scalars.
//!
//! Every continuous quantity in this crate (times, processing volumes,
//! weights) is a [`Rat`]: an arbitrary-precision rational kept in lowest
//! terms with a positive denominator. No floating point is used anywhere in
//! the simulation path, so equalities that hold mathematically (e.g. the two
//! formulations of weighted flow time) hold bit-for-bit in the outputs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact non-negative-capable rational scalar. `BigRational` already
/// guarantees the canonical form (lowest terms, positive denominator).
pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatError {
    #[error("logarithm base must be greater than 1")]
    InvalidBase,
    #[error("value must be positive")]
    NonPositiveValue,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("rational literal `{0}` has zero denominator")]
    ZeroDenominator(String),
}

/// Shorthand constructor from machine integers.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand for an integer-valued rational.
pub fn rint(value: i64) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

/// Exact integer power with negative exponents allowed (base must be nonzero
/// for negative exponents).
pub fn rat_pow(base: &Rat, exp: i64) -> Rat {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.clone(), (-exp) as usize).recip()
    }
}

/// The unique integer `k` with `base^k <= value < base^(k+1)`, computed by
/// exact comparison only.
pub fn floor_log(value: &Rat, base: &Rat) -> Result<i64, RatError> {
    if *base <= Rat::one() {
        return Err(RatError::InvalidBase);
    }
    if !value.is_positive() {
        return Err(RatError::NonPositiveValue);
    }
    let mut k: i64 = 0;
    let mut power = Rat::one();
    if *value >= Rat::one() {
        loop {
            let next = &power * base;
            if next > *value {
                return Ok(k);
            }
            power = next;
            k += 1;
        }
    } else {
        while power > *value {
            power /= base;
            k -= 1;
        }
        Ok(k)
    }
}

/// Least power of `base` that is >= `value`, as `(exponent, base^exponent)`.
pub fn ceil_to_power(value: &Rat, base: &Rat) -> Result<(i64, Rat), RatError> {
    let k = floor_log(value, base)?;
    let power = rat_pow(base, k);
    if power == *value {
        Ok((k, power))
    } else {
        Ok((k + 1, power * base))
    }
}

/// Canonical text form: `num` when the denominator is 1, `num/den` otherwise.
pub fn format_rat(value: &Rat) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Unconditional `num/den` form, used by the trace and report CSV columns.
pub fn format_rat_slash(value: &Rat) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parse `int` or `int/int` into a rational.
pub fn parse_rat(text: &str) -> Result<Rat, RatError> {
    let bad = || RatError::Malformed(text.to_string());
    match text.split_once('/') {
        None => {
            let n: BigInt = text.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(n))
        }
        Some((ns, ds)) => {
            let n: BigInt = ns.parse().map_err(|_| bad())?;
            let d: BigInt = ds.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(RatError::ZeroDenominator(text.to_string()));
            }
            Ok(Rat::new(n, d))
        }
    }
}

/// Decimal rendering with `sig` significant digits, for display-only CSV
/// columns. Exactness lives in the `num/den` columns; this is a convenience.
pub fn decimal_string(value: &Rat, sig: u32) -> String {
    assert!(sig > 0);
    if value.is_zero() {
        return "0".to_string();
    }
    let sign = if value.is_negative() { "-" } else { "" };
    let n = value.numer().abs();
    let d = value.denom().clone();
    let ten = BigInt::from(10);

    // e = floor(log10(n/d))
    let mut e: i64 = 0;
    if n >= d {
        let mut scaled = d.clone();
        while &scaled * &ten <= n {
            scaled *= &ten;
            e += 1;
        }
    } else {
        let mut scaled = n.clone();
        while scaled < d {
            scaled *= &ten;
            e -= 1;
        }
    }

    // Round n/d * 10^(sig-1-e) to the nearest integer: exactly `sig` digits,
    // or sig+1 when rounding carries over (e.g. 9.99... -> 10.0).
    let shift = i64::from(sig) - 1 - e;
    let (num, den) = if shift >= 0 {
        (n * num_traits::pow(ten.clone(), shift as usize), d)
    } else {
        (n, d * num_traits::pow(ten.clone(), (-shift) as usize))
    };
    let rounded: BigInt = (num * 2 + &den) / (den * 2);
    let mut digits = rounded.to_string();
    if digits.len() > sig as usize {
        e += 1;
        digits.truncate(sig as usize);
    }

    let mut out = String::new();
    if e >= 0 {
        let int_len = (e + 1) as usize;
        if int_len >= digits.len() {
            out.push_str(&digits);
            out.push_str(&"0".repeat(int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            let frac = digits[int_len..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        }
    } else {
        out.push_str("0.");
        out.push_str(&"0".repeat((-e - 1) as usize));
        out.push_str(digits.trim_end_matches('0'));
    }
    format!("{sign}{out}")
}
