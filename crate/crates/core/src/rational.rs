//! Exact rational helpers shared by every module.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational used for every numeric field.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty numeric literal")]
    Empty,
    #[error("`{0}` is not a finite rational (expected integer, `a/b` or decimal)")]
    Malformed(String),
    #[error("`{0}` has a zero denominator")]
    ZeroDenominator(String),
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"7"`, `"-3/4"`, `"2.125"` or `"1.5e-3"` into an exact rational.
///
/// Decimal literals are converted through their base-10 denominator, so
/// `"0.1"` is exactly `1/10`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = parse_integer(num.trim()).ok_or_else(malformed)?;
        let den: BigInt = parse_integer(den.trim()).ok_or_else(malformed)?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(num, den));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| malformed())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(malformed());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(malformed());
    }
    let all_digits = format!("{whole}{frac}");
    let mut numer: BigInt = all_digits.parse().map_err(|_| malformed())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(numer * num::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical text form: `"a"` for integers, `"a/b"` otherwise.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn min(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// `value / reference`, with `0/0` read as a perfect ratio of 1.
pub fn ratio_or_one(value: &Rational, reference: &Rational) -> Rational {
    if reference.is_zero() {
        Rational::one()
    } else {
        value / reference
    }
}

/// Rational lower bound on `1 - 1/e`.
pub fn one_minus_inv_e_lower() -> Rational {
    ratio(6321, 10000)
}

/// Rational bounds with `E_LOWER < e < E_UPPER`.
pub fn e_lower() -> Rational {
    ratio(271828, 100000)
}

pub fn e_upper() -> Rational {
    ratio(271829, 100000)
}

/// Decides `value >= factor * (1 - 1/e) * reference` exactly for the true `e`.
///
/// Rearranged to `e * (value - factor * reference) + factor * reference >= 0`,
/// which is monotone in `e`, so evaluating at the pessimistic end of the
/// interval `(E_LOWER, E_UPPER)` settles the inequality soundly.
pub fn at_least_one_minus_inv_e_fraction(
    value: &Rational,
    factor: &Rational,
    reference: &Rational,
) -> bool {
    let scaled = factor * reference;
    let slope = value - &scaled;
    let e = if slope.is_negative() { e_upper() } else { e_lower() };
    !(e * slope + scaled).is_negative()
}
