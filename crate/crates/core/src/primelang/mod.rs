//! Membership oracles for `P_b` (canonical base-b numerals of primes) and its
//! Kleene star, plus the search for `f_b(n)`, the least `k` making
//! `k * b^n + 1` prime.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::Serialize;

use crate::baseb::{self, check_base, CanonicalNumeral};
use crate::error::{Budget, Error, NumeralFault, Result};
use crate::numtheory::{is_prime_u64, Certainty, Natural, PrimalityTest};

mod nerode;

pub use nerode::{nerode_lower_bound, NerodeBound, DEFAULT_ENUMERATION_BOUND};

/// Language selector for the oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Language {
    /// Canonical numerals of primes.
    #[serde(rename = "P")]
    Pb,
    /// Concatenations of zero or more members of `P_b`.
    #[serde(rename = "P*")]
    PbStar,
}

impl Language {
    pub fn recognizer(self, base: u32) -> Recognizer {
        let state = match self {
            Language::Pb => {
                PrefixState::Numeral { value: Accumulator::zero(), len: 0, leading_zero: false }
            }
            Language::PbStar => PrefixState::Star { open: Vec::new(), accepting: true },
        };
        Recognizer { base, state }
    }

    /// Decides membership of a digit string.
    pub fn accepts(self, digits: &[u32], base: u32) -> bool {
        match self {
            Language::Pb => pb_reject_reason(digits, base, &PrimalityTest::default()).is_none(),
            Language::PbStar => star_decide(digits, base, &PrimalityTest::default()).is_some(),
        }
    }
}

/// Running value of a digit string, kept in a machine word while it fits.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Accumulator {
    Small(u64),
    Big(Natural),
}

impl Accumulator {
    fn zero() -> Self {
        Accumulator::Small(0)
    }

    fn push(&mut self, digit: u32, base: u32) {
        match self {
            Accumulator::Small(v) => {
                let next = v
                    .checked_mul(u64::from(base))
                    .and_then(|x| x.checked_add(u64::from(digit)));
                *self = match next {
                    Some(x) => Accumulator::Small(x),
                    None => Accumulator::Big(BigUint::from(*v) * base + digit),
                };
            }
            Accumulator::Big(v) => {
                *v = &*v * base + digit;
            }
        }
    }

    fn is_prime(&self, test: &PrimalityTest) -> bool {
        match self {
            Accumulator::Small(v) => is_prime_u64(*v),
            Accumulator::Big(v) => test.test(v).is_prime,
        }
    }
}

/// Incremental membership state for one prefix, advanced one digit at a time.
///
/// Pushing a digit tests each candidate last factor exactly once, so walking a
/// trie of strings costs one primality test per (factor start, end) pair.
#[derive(Clone, Debug)]
pub struct Recognizer {
    base: u32,
    state: PrefixState,
}

#[derive(Clone, Debug)]
enum PrefixState {
    Numeral { value: Accumulator, len: usize, leading_zero: bool },
    // Values of the suffixes that start at a reachable position with a
    // nonzero digit.
    Star { open: Vec<Accumulator>, accepting: bool },
}

impl Recognizer {
    pub fn push(&self, digit: u32) -> Recognizer {
        let base = self.base;
        let test = PrimalityTest::default();
        let state = match &self.state {
            PrefixState::Numeral { value, len, leading_zero } => {
                let mut value = value.clone();
                value.push(digit, base);
                PrefixState::Numeral {
                    value,
                    len: len + 1,
                    leading_zero: *leading_zero || (*len == 0 && digit == 0),
                }
            }
            PrefixState::Star { open, accepting } => {
                let mut open = open.clone();
                for v in &mut open {
                    v.push(digit, base);
                }
                if *accepting && digit != 0 {
                    open.push(Accumulator::Small(u64::from(digit)));
                }
                let accepting = open.iter().any(|v| v.is_prime(&test));
                PrefixState::Star { open, accepting }
            }
        };
        Recognizer { base, state }
    }

    pub fn accepting(&self) -> bool {
        match &self.state {
            PrefixState::Numeral { value, len, leading_zero } => {
                !leading_zero && *len > 0 && value.is_prime(&PrimalityTest::default())
            }
            PrefixState::Star { accepting, .. } => *accepting,
        }
    }

    /// True when no extension of the prefix can be accepted.
    pub fn is_dead(&self) -> bool {
        match &self.state {
            PrefixState::Numeral { leading_zero, .. } => *leading_zero,
            PrefixState::Star { open, accepting } => open.is_empty() && !accepting,
        }
    }
}

/// Why a string is not in `P_b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PbRejection {
    NonCanonical(NumeralFault),
    NotPrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PbMembership {
    pub member: bool,
    pub reason: Option<PbRejection>,
}

/// Membership in `P_b`. Malformed strings are rejected with a reason instead
/// of an error.
pub fn in_pb(text: &str, base: u32) -> PbMembership {
    in_pb_with(&PrimalityTest::default(), text, base)
}

pub fn in_pb_with(test: &PrimalityTest, text: &str, base: u32) -> PbMembership {
    let reason = match baseb::parse_digits(text, base) {
        Ok(digits) => pb_reject_reason(&digits, base, test),
        Err(Error::Numeral { fault, .. }) => Some(PbRejection::NonCanonical(fault)),
        Err(_) => Some(PbRejection::NonCanonical(NumeralFault::InvalidDigit)),
    };
    PbMembership { member: reason.is_none(), reason }
}

fn pb_reject_reason(digits: &[u32], base: u32, test: &PrimalityTest) -> Option<PbRejection> {
    match CanonicalNumeral::from_digits(digits.to_vec(), base) {
        Err(Error::Numeral { fault, .. }) => Some(PbRejection::NonCanonical(fault)),
        Err(_) => Some(PbRejection::NonCanonical(NumeralFault::InvalidDigit)),
        Ok(numeral) if test.test(&numeral.value()).is_prime => None,
        Ok(_) => Some(PbRejection::NotPrime),
    }
}

/// Factors of a string in `P_b^*`, each a canonical prime numeral.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarDecomposition {
    pub base: u32,
    pub factors: Vec<CanonicalNumeral>,
}

impl StarDecomposition {
    pub fn concatenated(&self) -> Vec<u32> {
        self.factors.iter().flat_map(|f| f.digits().iter().copied()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarMembership {
    pub member: bool,
    pub decomposition: Option<StarDecomposition>,
}

/// Membership in `P_b^*`. The empty string is a member with no factors.
///
/// When several factorizations exist the one with the fewest factors is
/// returned, ties going to the shorter first factor, then recursively.
pub fn in_pb_star(text: &str, base: u32) -> Result<StarMembership> {
    in_pb_star_with(&PrimalityTest::default(), text, base)
}

pub fn in_pb_star_with(test: &PrimalityTest, text: &str, base: u32) -> Result<StarMembership> {
    let digits = baseb::parse_digits(text, base)?;
    in_pb_star_digits_with(test, &digits, base)
}

pub fn in_pb_star_digits(digits: &[u32], base: u32) -> Result<StarMembership> {
    in_pb_star_digits_with(&PrimalityTest::default(), digits, base)
}

pub fn in_pb_star_digits_with(
    test: &PrimalityTest,
    digits: &[u32],
    base: u32,
) -> Result<StarMembership> {
    check_base(base)?;
    if let Some(position) = digits.iter().position(|&d| d >= base) {
        return Err(Error::Numeral { position, fault: NumeralFault::InvalidDigit });
    }
    let decomposition = star_decide(digits, base, test).map(|cuts| {
        let factors = cuts
            .windows(2)
            .map(|w| CanonicalNumeral::from_digits(digits[w[0]..w[1]].to_vec(), base))
            .collect::<Result<Vec<_>>>()
            .expect("factor boundaries never split at a zero digit");
        StarDecomposition { base, factors }
    });
    Ok(StarMembership { member: decomposition.is_some(), decomposition })
}

/// Returns factor boundaries `0 = c0 < c1 < ... < cm = len` of the preferred
/// factorization, or `None` when the string is not in the star.
fn star_decide(digits: &[u32], base: u32, test: &PrimalityTest) -> Option<Vec<usize>> {
    const UNREACHABLE: usize = usize::MAX;
    let len = digits.len();
    let mut memo: HashMap<(usize, usize), bool> = HashMap::new();
    let mut factor_is_prime = |i: usize, j: usize, value: &Accumulator| -> bool {
        *memo.entry((i, j)).or_insert_with(|| value.is_prime(test))
    };

    // fewest[i]: fewest factors covering digits[i..].
    let mut fewest = vec![UNREACHABLE; len + 1];
    fewest[len] = 0;
    for i in (0..len).rev() {
        if digits[i] == 0 {
            continue;
        }
        let mut value = Accumulator::zero();
        for j in i + 1..=len {
            value.push(digits[j - 1], base);
            let rest = fewest[j];
            if rest == UNREACHABLE || rest + 1 >= fewest[i] {
                continue;
            }
            if factor_is_prime(i, j, &value) {
                fewest[i] = rest + 1;
            }
        }
    }
    if fewest[0] == UNREACHABLE {
        return None;
    }

    let mut cuts = vec![0];
    let mut i = 0;
    while i < len {
        let mut value = Accumulator::zero();
        let mut next = None;
        for j in i + 1..=len {
            value.push(digits[j - 1], base);
            if fewest[j] != UNREACHABLE
                && fewest[j] + 1 == fewest[i]
                && factor_is_prime(i, j, &value)
            {
                next = Some(j);
                break;
            }
        }
        i = next.expect("a reachable position has a factor leading to its best suffix");
        cuts.push(i);
    }
    Some(cuts)
}

/// `f_b(n)` together with the prime it produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FbResult {
    pub base: u32,
    pub n: u64,
    #[serde(with = "crate::serde_dec")]
    pub k_star: Natural,
    #[serde(with = "crate::serde_dec")]
    pub prime_found: Natural,
    /// Number of k values rejected before `k_star`.
    pub composite_prefix_checked: u64,
    pub certainty: Certainty,
}

/// Scans `k = 1, 2, ...` for the first prime `k * b^n + 1`.
///
/// Such a `k` always exists (primes in the progression `1 mod b^n`), but no
/// effective bound is known, so the scan stops at `k_budget` with a budget
/// error.
pub fn compute_fb(base: u32, n: u64, k_budget: u64) -> Result<FbResult> {
    compute_fb_with(&PrimalityTest::default(), base, n, k_budget)
}

pub fn compute_fb_with(test: &PrimalityTest, base: u32, n: u64, k_budget: u64) -> Result<FbResult> {
    check_base(base)?;
    if n == 0 {
        return Err(Error::domain("exponent n must be at least 1"));
    }
    if k_budget == 0 {
        return Err(Error::domain("k budget must be at least 1"));
    }
    let exp = u32::try_from(n).map_err(|_| Error::domain("exponent too large"))?;
    let step: Natural = BigUint::from(base).pow(exp);
    let mut candidate = &step + BigUint::one();
    for k in 1..=k_budget {
        let verdict = test.test(&candidate);
        if verdict.is_prime {
            return Ok(FbResult {
                base,
                n,
                k_star: BigUint::from(k),
                prime_found: candidate,
                composite_prefix_checked: k - 1,
                certainty: verdict.certainty,
            });
        }
        candidate += &step;
    }
    Err(Error::Budget(Budget::KScan { base, n, last_k: k_budget }))
}
