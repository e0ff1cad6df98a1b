//! Canonical base-b numerals: most significant digit first, no leading zeros.
//!
//! In text form digits above 9 are the lowercase letters `a`-`z`, so text
//! numerals are limited to bases up to 36. The in-memory [`CanonicalNumeral`]
//! accepts any base `b >= 2`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, NumeralFault, Result};
use crate::numtheory::Natural;

/// Largest base with a text representation.
pub const MAX_TEXT_BASE: u32 = 36;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalNumeral {
    base: u32,
    digits: Vec<u32>,
}

impl CanonicalNumeral {
    /// Validates a digit vector against the canonical-form rules.
    pub fn from_digits(digits: Vec<u32>, base: u32) -> Result<Self> {
        check_base(base)?;
        if digits.is_empty() {
            return Err(Error::Numeral { position: 0, fault: NumeralFault::Empty });
        }
        if let Some(position) = digits.iter().position(|&d| d >= base) {
            return Err(Error::Numeral { position, fault: NumeralFault::InvalidDigit });
        }
        if digits.len() > 1 && digits[0] == 0 {
            return Err(Error::Numeral { position: 0, fault: NumeralFault::LeadingZero });
        }
        Ok(CanonicalNumeral { base, digits })
    }

    /// Parses a text numeral, rejecting non-canonical input.
    pub fn parse(text: &str, base: u32) -> Result<Self> {
        check_base(base)?;
        if text.is_empty() {
            return Err(Error::Numeral { position: 0, fault: NumeralFault::Empty });
        }
        CanonicalNumeral::from_digits(parse_digits(text, base)?, base)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Positional value of the digits.
    pub fn value(&self) -> Natural {
        digits_value(&self.digits, self.base)
    }

    /// Text form, or `None` for bases above [`MAX_TEXT_BASE`].
    pub fn to_text(&self) -> Option<String> {
        digits_to_text(&self.digits, self.base)
    }
}

impl fmt::Display for CanonicalNumeral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_text() {
            Some(text) => f.write_str(&text),
            None => write!(f, "{:?}", self.digits),
        }
    }
}

impl Serialize for CanonicalNumeral {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self.to_text() {
            Some(text) => ser.serialize_str(&text),
            None => self.digits.serialize(ser),
        }
    }
}

pub(crate) fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        return Err(Error::domain(format!("base must be at least 2, got {base}")));
    }
    Ok(())
}

pub fn digit_char(d: u32) -> Option<char> {
    char::from_digit(d, MAX_TEXT_BASE)
}

pub fn digit_value(c: char) -> Option<u32> {
    match c {
        '0'..='9' | 'a'..='z' => c.to_digit(MAX_TEXT_BASE),
        _ => None,
    }
}

/// Converts text to digit values, checking only the alphabet.
pub fn parse_digits(text: &str, base: u32) -> Result<Vec<u32>> {
    check_base(base)?;
    if base > MAX_TEXT_BASE {
        return Err(Error::domain(format!("base {base} has no text form")));
    }
    text.chars()
        .enumerate()
        .map(|(position, c)| match digit_value(c) {
            Some(d) if d < base => Ok(d),
            _ => Err(Error::Numeral { position, fault: NumeralFault::InvalidDigit }),
        })
        .collect()
}

pub fn digits_to_text(digits: &[u32], base: u32) -> Option<String> {
    if base > MAX_TEXT_BASE {
        return None;
    }
    digits.iter().map(|&d| digit_char(d)).collect()
}

pub(crate) fn digits_value(digits: &[u32], base: u32) -> Natural {
    let mut value = BigUint::zero();
    for &d in digits {
        value = value * base + d;
    }
    value
}

/// `(n)_b`, the canonical numeral of `n`.
pub fn to_base(n: &Natural, base: u32) -> Result<CanonicalNumeral> {
    check_base(base)?;
    let digits = if n.is_zero() {
        vec![0]
    } else if base <= 256 {
        n.to_radix_be(base).into_iter().map(u32::from).collect()
    } else {
        let divisor = BigUint::from(base);
        let mut rest = n.clone();
        let mut out = Vec::new();
        while !rest.is_zero() {
            let (q, r) = rest.div_rem(&divisor);
            out.push(r.to_u32().unwrap());
            rest = q;
        }
        out.reverse();
        out
    };
    Ok(CanonicalNumeral { base, digits })
}

/// Value of a canonical text numeral.
pub fn from_base(text: &str, base: u32) -> Result<Natural> {
    Ok(CanonicalNumeral::parse(text, base)?.value())
}

/// `(k)_b 0^(n-1) 1`, the numeral of `k * b^n + 1`.
pub fn witness_numeral(base: u32, n: u64, k: &Natural) -> Result<CanonicalNumeral> {
    check_base(base)?;
    if n == 0 {
        return Err(Error::domain("witness exponent n must be at least 1"));
    }
    if k.is_zero() {
        return Err(Error::domain("witness multiplier k must be at least 1"));
    }
    let zeros = usize::try_from(n - 1).map_err(|_| Error::domain("exponent too large"))?;
    let mut digits = to_base(k, base)?.digits;
    digits.reserve(zeros + 1);
    digits.extend(std::iter::repeat_n(0, zeros));
    digits.push(1);
    Ok(CanonicalNumeral { base, digits })
}
