//! Serde adapters that carry big integers as decimal strings.

use std::str::FromStr;

use num_bigint::BigUint;
use serde::Serializer;

pub fn serialize<S: Serializer>(value: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
    ser.collect_str(value)
}

/// Strict decimal parse: ASCII digits only, no sign, no whitespace.
pub fn parse(text: &str) -> Result<BigUint, String> {
    if text.is_empty() || !text.bytes().all(|c| c.is_ascii_digit()) {
        return Err(format!("expected a decimal integer string, got {text:?}"));
    }
    BigUint::from_str(text).map_err(|e| e.to_string())
}
