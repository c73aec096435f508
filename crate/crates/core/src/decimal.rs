//! Decimal rendering of dyadic values, and parsing of decimal literals.
//!
//! All conversions go through exact rationals so that a printed digit string
//! is the correctly rounded (half away from zero) image of the midpoint.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ball::{BigReal, Dyadic};
use crate::error::{Error, Result};

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

/// `v · 10^k` as an exact rational.
fn scale10(v: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        v * BigRational::from_integer(pow10(k as u32))
    } else {
        v / BigRational::from_integer(pow10((-k) as u32))
    }
}

/// Rounds a nonnegative rational to the nearest integer, halves away from zero.
fn round_half_up(v: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    (v.numer() * &two + v.denom()).div_floor(&(v.denom() * &two))
}

/// Decimal digits and exponent of `|x|` rounded to `digits` significant
/// digits: `|x| ≈ d_1.d_2…d_D · 10^e`. Returns `None` for zero.
pub fn significant_digits(x: &Dyadic, digits: u32) -> Option<(String, i64)> {
    if x.is_zero() {
        return None;
    }
    let digits = digits.max(1);
    let v = x.to_rational().abs();
    let mut e = (x.log2_abs() * std::f64::consts::LOG10_2).floor() as i64;
    let lo = pow10(digits - 1);
    let hi = pow10(digits);
    loop {
        let n = round_half_up(&scale10(&v, digits as i64 - 1 - e));
        if n >= hi {
            e += 1;
        } else if n < lo {
            e -= 1;
        } else {
            return Some((n.to_string(), e));
        }
    }
}

/// Scientific rendering, e.g. `1.203473556e-735`.
pub fn format_sci(x: &Dyadic, digits: u32) -> String {
    match significant_digits(x, digits) {
        None => "0".to_string(),
        Some((d, e)) => {
            let sign = if x.is_negative() { "-" } else { "" };
            let (head, tail) = d.split_at(1);
            if tail.is_empty() {
                format!("{sign}{head}e{e}")
            } else {
                format!("{sign}{head}.{tail}e{e}")
            }
        }
    }
}

/// Fixed-point rendering with exactly `decimals` digits after the point.
pub fn format_fixed(x: &Dyadic, decimals: u32) -> String {
    let v = x.to_rational();
    let n = round_half_up(&scale10(&v.abs(), decimals as i64));
    let s = n.to_string();
    let s = if s.len() <= decimals as usize {
        format!("{}{}", "0".repeat(decimals as usize + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = s.split_at(s.len() - decimals as usize);
    let sign = if v.is_negative() && !n.is_zero() {
        "-"
    } else {
        ""
    };
    if decimals == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Renders `digits` significant digits, switching to scientific notation
/// outside `[1e-6, 1e15)` or when `force_sci` is set.
pub fn format_significant(x: &Dyadic, digits: u32, force_sci: bool) -> String {
    let Some((_, e)) = significant_digits(x, digits) else {
        return "0".to_string();
    };
    if force_sci || !(-6..15).contains(&e) {
        return format_sci(x, digits);
    }
    let decimals = (digits as i64 - 1 - e).max(0) as u32;
    format_fixed(x, decimals)
}

/// Two-digit upward-rounded rendering of an error bound, e.g. `3.1e-14`.
pub fn format_err(err: &Dyadic) -> String {
    if err.is_zero() {
        return "0".to_string();
    }
    let r = err.to_rational().abs();
    let mut e = (err.log2_abs() * std::f64::consts::LOG10_2).floor() as i64;
    loop {
        let scaled = scale10(&r, 1 - e);
        let n = scaled.ceil().to_integer();
        if n >= BigInt::from(100) {
            e += 1;
            continue;
        }
        if n < BigInt::from(10) {
            e -= 1;
            continue;
        }
        let s = n.to_string();
        return format!("{}.{}e{}", &s[..1], &s[1..], e);
    }
}

/// Parses decimal literals such as `7.371968801`, `-0.5`, `1.2e-735` or
/// `1.203473556·10^-735` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(format!("not a decimal literal: {s:?}"));
    let t = s.trim().replace('·', "*");
    let (mant, exp) = if let Some((m, e)) = t.split_once("*10^") {
        (
            m.trim().to_string(),
            e.trim().trim_matches(|c| c == '{' || c == '}').to_string(),
        )
    } else if let Some((m, e)) = t.split_once(['e', 'E']) {
        (m.to_string(), e.to_string())
    } else {
        (t.clone(), "0".to_string())
    };
    let exp: i64 = exp.parse().map_err(|_| err())?;
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(&mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| err())?;
    let v = scale10(&BigRational::from_integer(digits), exp - frac.len() as i64);
    Ok(if neg { -v } else { v })
}

/// Number of digits after the decimal point in the mantissa of a literal,
/// and its decimal exponent; together they fix the unit in the last place.
pub fn literal_ulp(s: &str) -> Result<BigRational> {
    let t = s.trim().replace('·', "*");
    let (mant, exp) = if let Some((m, e)) = t.split_once("*10^") {
        (
            m.trim().to_string(),
            e.trim()
                .trim_matches(|c| c == '{' || c == '}')
                .parse::<i64>(),
        )
    } else if let Some((m, e)) = t.split_once(['e', 'E']) {
        (m.to_string(), e.parse::<i64>())
    } else {
        (t.clone(), Ok(0))
    };
    let exp = exp.map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
    let decimals = mant.split_once('.').map_or(0, |(_, f)| f.len()) as i64;
    Ok(scale10(&BigRational::one(), exp - decimals))
}

/// Renders `x` in the same shape as a reference literal: same count of
/// fractional mantissa digits, and scientific form iff the literal uses it.
pub fn format_like(x: &Dyadic, literal: &str) -> String {
    let t = literal.trim().replace('·', "*");
    let sci = t.contains("*10^") || t.contains(['e', 'E']);
    let mant = t.split(['*', 'e', 'E']).next().unwrap_or("");
    let decimals = mant.split_once('.').map_or(0, |(_, f)| f.len()) as u32;
    if sci {
        format_sci(x, decimals + 1)
    } else {
        format_fixed(x, decimals)
    }
}

/// True when the whole ball lies within half a unit in the last place of
/// the literal, i.e. every point of the ball rounds to that literal.
pub fn ball_matches_literal(x: &BigReal, literal: &str) -> Result<bool> {
    let g = parse_decimal(literal)?;
    let half = literal_ulp(literal)? / BigRational::from_integer(2.into());
    let lo = x.lower().to_rational();
    let hi = x.upper().to_rational();
    Ok(&g - &half <= lo && hi <= &g + &half)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(x: f64) -> Dyadic {
        Dyadic::from_f64(x).unwrap()
    }

    #[test]
    fn scientific_and_fixed() {
        assert_eq!(format_sci(&d(7.371968801), 10), "7.371968801e0");
        assert_eq!(format_fixed(&d(0.0000193106950891716), 10), "0.0000193107");
        assert_eq!(format_fixed(&d(-2.5), 0), "-3");
        assert_eq!(format_significant(&d(2.5), 10, false), "2.500000000");
        assert_eq!(format_significant(&d(1.5e-20), 3, false), "1.50e-20");
        assert_eq!(format_sci(&d(9.9999999), 3), "1.00e1");
    }

    #[test]
    fn error_bounds_round_up() {
        assert_eq!(format_err(&d(3.01e-14)), "3.1e-14");
        assert_eq!(format_err(&d(1.0)), "1.0e0");
        assert_eq!(format_err(&Dyadic::zero()), "0");
    }

    #[test]
    fn parsing_literals() {
        let a = parse_decimal("1.203473556·10^{-735}").unwrap();
        let b = parse_decimal("1.203473556e-735").unwrap();
        assert_eq!(a, b);
        assert_eq!(
            literal_ulp("0.0000193107").unwrap(),
            BigRational::new(1.into(), pow10(10))
        );
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("abc").is_err());
    }

    #[test]
    fn literal_shape_is_reproduced() {
        assert_eq!(
            format_like(&d(1.00000000004), "1.0000000000"),
            "1.0000000000"
        );
        assert_eq!(
            format_like(&d(0.95847868705788), "0.9584786871"),
            "0.9584786871"
        );
    }
}
