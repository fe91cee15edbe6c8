use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type BigRat = BigRational;

pub fn rat(numer: i64, denom: i64) -> BigRat {
    BigRat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(value))
}

/// Interval endpoint: a rational or one of the two infinities.
///
/// The derived order puts `MinusInfinity` below every finite value and
/// `PlusInfinity` above.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRat {
    MinusInfinity,
    Finite(BigRat),
    PlusInfinity,
}

impl ExtRat {
    pub fn finite(&self) -> Option<&BigRat> {
        match self {
            ExtRat::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl From<BigRat> for ExtRat {
    fn from(value: BigRat) -> Self {
        ExtRat::Finite(value)
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::MinusInfinity => f.write_str("-inf"),
            ExtRat::PlusInfinity => f.write_str("+inf"),
            ExtRat::Finite(v) => f.write_str(&format_rational(v)),
        }
    }
}

/// Canonical text form `p/q`: lowest terms, sign carried by `p`, `q >= 1`.
/// Integers keep the `/1` suffix so every value has one spelling.
pub fn format_rational(value: &BigRat) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses an exact rational from an integer (`-3`), a fraction (`7/8`) or a
/// finite decimal (`-0.25`). Exponent notation is rejected.
pub fn parse_rational(text: &str) -> Result<BigRat> {
    let normalized = text.trim().replace('\u{2212}', "-");
    let bad = |msg: &str| Error::parse(format!("{text:?}"), msg.to_string());
    if normalized.is_empty() {
        return Err(bad("empty rational literal"));
    }
    if let Some((p, q)) = normalized.split_once('/') {
        let numer = parse_integer(p).ok_or_else(|| bad("numerator is not an integer"))?;
        let denom = parse_integer(q).ok_or_else(|| bad("denominator is not an integer"))?;
        if denom.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRat::new(numer, denom));
    }
    if let Some((whole, frac)) = normalized.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if whole_digits.is_empty()
            || frac.is_empty()
            || !whole_digits.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || whole.len() - whole_digits.len() > 1
        {
            return Err(bad("malformed decimal literal"));
        }
        let digits: BigInt = format!("{whole_digits}{frac}")
            .parse()
            .map_err(|_| bad("malformed decimal literal"))?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = BigRat::new(digits, scale);
        return Ok(if negative { -value } else { value });
    }
    parse_integer(&normalized)
        .map(BigRat::from_integer)
        .ok_or_else(|| bad("not an integer, fraction or decimal"))
}

fn parse_integer(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix(['-', '+']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// Sign as -1, 0 or 1.
pub fn sign_of<T: Signed>(value: &T) -> i8 {
    if value.is_zero() {
        0
    } else if value.is_positive() {
        1
    } else {
        -1
    }
}
