//! Compositeness certificates for `k * b^N + 1` with `N = (bK)! + 1`, the
//! search for exponents `N` with `f_b(N) > K`, and the families of numerals
//! `(k * b^n + 1)_b` that fall outside `P_b^*`.
//!
//! A certificate for `1 <= k <= K` records `m = bk + 1`, the order `d` of `b`
//! modulo `m`, and `r = N mod d`. Since `d <= bk` divides `(bK)!`, `r` is 1
//! and `k * b^N + 1 = k * b^r + 1 = bk + 1 = 0 (mod m)`. None of this needs
//! `b^N` itself, so certificates exist for exponents far too large to write
//! down.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::baseb::{check_base, witness_numeral, CanonicalNumeral};
use crate::error::{Budget, Error, Result};
use crate::numtheory::{factorial, factorial_mod, mod_pow, multiplicative_order, Natural};
use crate::primelang::compute_fb;
use crate::serde_dec;

/// Largest `bK` whose exponent `(bK)! + 1` is written out in full. `20!` is
/// the largest factorial that fits a machine word.
pub const LITERAL_EXPONENT_LIMIT: u64 = 20;

const SYMBOLIC_FORM: &str = "(bK)!+1";

/// The exponent `N = (bK)! + 1`, literal when small and symbolic otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorialExponent {
    pub bk: Natural,
    pub literal: Option<Natural>,
}

impl FactorialExponent {
    fn new(bk: Natural) -> Self {
        let literal = bk
            .to_u64()
            .filter(|&v| v <= LITERAL_EXPONENT_LIMIT)
            .map(|_| factorial(&bk, LITERAL_EXPONENT_LIMIT).expect("within limit") + 1u32);
        FactorialExponent { bk, literal }
    }

    /// `N mod d` without materializing a symbolic `N`.
    pub fn residue(&self, d: &Natural) -> Result<Natural> {
        if d.is_zero() {
            return Err(Error::domain("residue modulus must be at least 1"));
        }
        match &self.literal {
            Some(n) => Ok(n % d),
            None => Ok((factorial_mod(&self.bk, d)? + 1u32) % d),
        }
    }

    /// The `N_form` field of the wire format.
    pub fn form(&self) -> String {
        match &self.literal {
            Some(n) => n.to_string(),
            None => SYMBOLIC_FORM.to_string(),
        }
    }
}

impl fmt::Display for FactorialExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.literal {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "({})!+1", self.bk),
        }
    }
}

/// `N = (bK)! + 1`, the exponent past which every `k <= K` gives a
/// composite `k * b^N + 1`.
pub fn proposition_n(base: u32, bound_k: &Natural) -> Result<FactorialExponent> {
    check_base(base)?;
    if bound_k.is_zero() {
        return Err(Error::domain("K must be at least 1"));
    }
    Ok(FactorialExponent::new(bound_k * base))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositenessCertificate {
    pub base: u32,
    pub bound_k: Natural,
    pub exponent: FactorialExponent,
    pub k: Natural,
    /// `m = bk + 1`.
    pub modulus: Natural,
    /// `d = ord_m(b)`.
    pub order: Natural,
    /// `r = N mod d`.
    pub residue: Natural,
}

/// Builds the certificate that `bk + 1` divides `k * b^N + 1`.
pub fn divisor_certificate(
    base: u32,
    bound_k: &Natural,
    k: &Natural,
    order_bound: u64,
) -> Result<CompositenessCertificate> {
    let exponent = proposition_n(base, bound_k)?;
    if k.is_zero() || k > bound_k {
        return Err(Error::domain(format!("k = {k} outside [1, {bound_k}]")));
    }
    let modulus = k * base + 1u32;
    let order = multiplicative_order(&BigUint::from(base), &modulus, order_bound)?;
    let residue = exponent.residue(&order)?;
    Ok(CompositenessCertificate {
        base,
        bound_k: bound_k.clone(),
        exponent,
        k: k.clone(),
        modulus,
        order,
        residue,
    })
}

/// One certificate for each `k` in `1..=K`.
pub fn certificates(
    base: u32,
    bound_k: &Natural,
    order_bound: u64,
) -> Result<Vec<CompositenessCertificate>> {
    let count = bound_k
        .to_u64()
        .ok_or_else(|| Error::domain("K too large to enumerate"))?;
    (1..=count)
        .map(|k| divisor_certificate(base, bound_k, &BigUint::from(k), order_bound))
        .collect()
}

/// The certificate invariant that failed verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateViolation {
    Parameters(String),
    Coprimality,
    Order(String),
    Divisibility,
    Modulus,
    Residue,
    ProperDivisor,
}

impl CertificateViolation {
    pub fn invariant(&self) -> &'static str {
        match self {
            CertificateViolation::Parameters(_) => "parameters",
            CertificateViolation::Coprimality => "coprimality",
            CertificateViolation::Order(_) => "order",
            CertificateViolation::Divisibility => "divisibility",
            CertificateViolation::Modulus => "modulus",
            CertificateViolation::Residue => "residue",
            CertificateViolation::ProperDivisor => "proper-divisor",
        }
    }
}

impl fmt::Display for CertificateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateViolation::Parameters(why) => write!(f, "parameters: {why}"),
            CertificateViolation::Coprimality => f.write_str("coprimality: gcd(b, m) != 1"),
            CertificateViolation::Order(why) => write!(f, "order: {why}"),
            CertificateViolation::Divisibility => {
                f.write_str("divisibility: k * b^r + 1 != 0 (mod m)")
            }
            CertificateViolation::Modulus => f.write_str("modulus: m != b*k + 1"),
            CertificateViolation::Residue => f.write_str("residue: r != N mod d"),
            CertificateViolation::ProperDivisor => {
                f.write_str("proper-divisor: m is not a proper divisor")
            }
        }
    }
}

/// Re-derives every certificate invariant from `b`, `K` and `k`; stored `d`
/// and `r` are checked, never trusted.
pub fn verify_certificate(
    cert: &CompositenessCertificate,
    order_bound: u64,
) -> std::result::Result<(), CertificateViolation> {
    use CertificateViolation as V;

    let b = BigUint::from(cert.base);
    if cert.base < 2 {
        return Err(V::Parameters("b < 2".into()));
    }
    if cert.bound_k.is_zero() || cert.k.is_zero() || cert.k > cert.bound_k {
        return Err(V::Parameters("need 1 <= k <= K".into()));
    }
    if cert.exponent.bk != &cert.bound_k * cert.base {
        return Err(V::Parameters("bK != b * K".into()));
    }
    let expected_exponent = FactorialExponent::new(cert.exponent.bk.clone());
    if cert.exponent.literal.is_some() && cert.exponent.literal != expected_exponent.literal {
        return Err(V::Parameters("N != (bK)! + 1".into()));
    }

    if cert.modulus < BigUint::from(2u32) || !b.gcd(&cert.modulus).is_one() {
        return Err(V::Coprimality);
    }

    let m = &cert.modulus;
    let d = &cert.order;
    if d.is_zero() || *d > &cert.k * cert.base {
        return Err(V::Order("d not in [1, bk]".into()));
    }
    if !mod_pow(&b, d, m).is_ok_and(|v| v.is_one()) {
        return Err(V::Order("b^d != 1 (mod m)".into()));
    }
    match multiplicative_order(&b, m, order_bound) {
        Ok(fresh) if fresh == *d => {}
        Ok(fresh) => return Err(V::Order(format!("d = {d} but ord_m(b) = {fresh}"))),
        Err(e) => return Err(V::Order(e.to_string())),
    }

    let lhs = (&cert.k * mod_pow(&b, &cert.residue, m).expect("m >= 2") + 1u32) % m;
    if !lhs.is_zero() {
        return Err(V::Divisibility);
    }

    if *m != &cert.k * cert.base + 1u32 {
        return Err(V::Modulus);
    }

    match expected_exponent.residue(d) {
        Ok(r) if r == cert.residue => {}
        _ => return Err(V::Residue),
    }

    // N >= 2 gives k*b^N + 1 >= k*b^2 + 1 > bk + 1 = m >= 3.
    let exponent_at_least_two = match &expected_exponent.literal {
        Some(n) => *n >= BigUint::from(2u32),
        None => true,
    };
    if !exponent_at_least_two || *m < BigUint::from(3u32) || *m > &cert.k * &b * &b {
        return Err(V::ProperDivisor);
    }
    Ok(())
}

/// Checks `m | k * b^N + 1` by full-width division when `N` is literal and at
/// most `max_exponent`. `None` when the number is too large to build.
pub fn direct_divisibility(cert: &CompositenessCertificate, max_exponent: u64) -> Option<bool> {
    let n = cert.exponent.literal.as_ref()?.to_u32()?;
    if u64::from(n) > max_exponent {
        return None;
    }
    let value = &cert.k * BigUint::from(cert.base).pow(n) + 1u32;
    Some((value % &cert.modulus).is_zero())
}

#[derive(Serialize, Deserialize)]
struct CertificateWire {
    b: String,
    #[serde(rename = "K")]
    bound_k: String,
    #[serde(rename = "N_form")]
    n_form: String,
    #[serde(rename = "bK")]
    bk: String,
    k: String,
    m: String,
    d: String,
    r: String,
}

impl Serialize for CompositenessCertificate {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateWire {
            b: self.base.to_string(),
            bound_k: self.bound_k.to_string(),
            n_form: self.exponent.form(),
            bk: self.exponent.bk.to_string(),
            k: self.k.to_string(),
            m: self.modulus.to_string(),
            d: self.order.to_string(),
            r: self.residue.to_string(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CompositenessCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = CertificateWire::deserialize(de)?;
        CompositenessCertificate::try_from(wire).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<CertificateWire> for CompositenessCertificate {
    type Error = String;

    fn try_from(wire: CertificateWire) -> std::result::Result<Self, String> {
        let base = serde_dec::parse(&wire.b)?
            .to_u32()
            .ok_or_else(|| "b out of range".to_string())?;
        let bk = serde_dec::parse(&wire.bk)?;
        let literal = if wire.n_form == SYMBOLIC_FORM {
            None
        } else {
            Some(serde_dec::parse(&wire.n_form)?)
        };
        Ok(CompositenessCertificate {
            base,
            bound_k: serde_dec::parse(&wire.bound_k)?,
            exponent: FactorialExponent { bk, literal },
            k: serde_dec::parse(&wire.k)?,
            modulus: serde_dec::parse(&wire.m)?,
            order: serde_dec::parse(&wire.d)?,
            residue: serde_dec::parse(&wire.r)?,
        })
    }
}

/// Reads whitespace-separated JSON certificate objects (one per line as
/// written by the CLI, or pretty-printed).
pub fn parse_certificates(text: &str) -> Result<Vec<CompositenessCertificate>> {
    serde_json::Deserializer::from_str(text)
        .into_iter::<CompositenessCertificate>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Certificate(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanEntry {
    pub n: u64,
    #[serde(with = "crate::serde_dec")]
    pub fb: Natural,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HardExponentResult {
    pub base: u32,
    #[serde(rename = "K", with = "crate::serde_dec")]
    pub bound_k: Natural,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(with = "crate::serde_dec")]
    pub fb_at_n: Natural,
    pub scan_log: Vec<ScanEntry>,
}

/// First exponent `n` in `1..=n_limit` with `f_b(n) > K`, by computing
/// `f_b(n)` for each `n` in turn.
pub fn smallest_hard_n(
    base: u32,
    bound_k: &Natural,
    n_limit: u64,
    k_budget: u64,
) -> Result<HardExponentResult> {
    check_base(base)?;
    if bound_k.is_zero() {
        return Err(Error::domain("K must be at least 1"));
    }
    let mut scan_log = Vec::new();
    for n in 1..=n_limit {
        let fb = match compute_fb(base, n, k_budget) {
            Ok(r) => r.k_star,
            Err(Error::Budget(inner)) => {
                return Err(Error::Budget(Budget::ExponentScanInner {
                    base,
                    k_bound: bound_k.to_string(),
                    inner: Box::new(inner),
                    scan_log,
                }));
            }
            Err(e) => return Err(e),
        };
        scan_log.push(ScanEntry { n, fb: fb.clone() });
        if fb > *bound_k {
            return Ok(HardExponentResult {
                base,
                bound_k: bound_k.clone(),
                n,
                fb_at_n: fb,
                scan_log,
            });
        }
    }
    Err(Error::Budget(Budget::ExponentScan {
        base,
        k_bound: bound_k.to_string(),
        n_limit,
        scan_log,
    }))
}

/// The numerals `(k * b^n + 1)_b` for `1 <= k < f_b(n)`; none of them is in
/// `P_b^*`.
pub fn lemma_witnesses(base: u32, n: u64, k_budget: u64) -> Result<Vec<CanonicalNumeral>> {
    let fb = compute_fb(base, n, k_budget)?;
    let count = fb.k_star.to_u64().expect("k_star <= k_budget");
    (1..count)
        .map(|k| witness_numeral(base, n, &BigUint::from(k)))
        .collect()
}
