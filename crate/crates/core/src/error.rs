use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::witness::ScanEntry;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid numeral at position {position}: {fault}")]
    Numeral { position: usize, fault: NumeralFault },

    #[error("budget exhausted: {0}")]
    Budget(Budget),

    #[error("line {line}: {message}")]
    DfaSyntax { line: usize, message: String },

    #[error("invalid DFA: {0}")]
    DfaInvalid(String),

    #[error("malformed certificate: {0}")]
    Certificate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}

/// Why a string failed numeral validation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NumeralFault {
    Empty,
    InvalidDigit,
    LeadingZero,
}

impl fmt::Display for NumeralFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NumeralFault::Empty => "empty numeral",
            NumeralFault::InvalidDigit => "digit out of range for base",
            NumeralFault::LeadingZero => "leading zero",
        })
    }
}

/// A search or materialization limit that was hit before an answer was found.
///
/// Budget errors never claim that an answer does not exist, only that the
/// configured limit was too small to reach it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Budget {
    /// No prime `k * b^n + 1` was found for `k <= last_k`.
    KScan { base: u32, n: u64, last_k: u64 },
    /// The modulus exceeds the brute-force order search bound.
    OrderSearch { modulus: String, bound: u64 },
    /// The factorial argument exceeds the materialization bound.
    Factorial { n: String, bound: u64 },
    /// No exponent `n <= n_limit` had `f_b(n) > k_bound`.
    ExponentScan { base: u32, k_bound: String, n_limit: u64, scan_log: Vec<ScanEntry> },
    /// An exponent scan stopped because an inner `f_b(n)` search ran out of room.
    ExponentScanInner { base: u32, k_bound: String, inner: Box<Budget>, scan_log: Vec<ScanEntry> },
    /// Exhaustive string enumeration would exceed the allowed count.
    Enumeration { strings: String, bound: u64 },
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::KScan { base, n, last_k } => write!(
                f,
                "no prime k*{base}^{n}+1 with k <= {last_k}"
            ),
            Budget::OrderSearch { modulus, bound } => {
                write!(f, "modulus {modulus} exceeds order search bound {bound}")
            }
            Budget::Factorial { n, bound } => {
                write!(f, "{n}! exceeds factorial bound {bound}")
            }
            Budget::ExponentScan { base, k_bound, n_limit, scan_log } => write!(
                f,
                "no n <= {n_limit} with f_{base}(n) > {k_bound} ({} exponents scanned)",
                scan_log.len()
            ),
            Budget::ExponentScanInner { base, k_bound, inner, scan_log } => write!(
                f,
                "search for n with f_{base}(n) > {k_bound} stopped after {} exponents: {inner}",
                scan_log.len()
            ),
            Budget::Enumeration { strings, bound } => {
                write!(f, "{strings} strings to enumerate, limit is {bound}")
            }
        }
    }
}
