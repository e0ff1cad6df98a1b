//! Arbitrary-precision number theory: primality, modular powers,
//! multiplicative order and factorials.
//!
//! Primality below 2^64 is decided exactly by Miller-Rabin over the first
//! twelve prime bases. Above 2^64 the test is Baillie-PSW (a base-2 strong
//! probable-prime test plus a strong Lucas test) followed by a configurable
//! number of Miller-Rabin rounds with random bases; such answers are reported
//! as [`Certainty::Probable`]. A composite answer is always exact.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use crate::error::{Budget, Error, Result};

/// Non-negative integer of unbounded width.
pub type Natural = BigUint;

/// Default limit on the modulus accepted by [`multiplicative_order`].
pub const DEFAULT_ORDER_BOUND: u64 = 100_000_000;
/// Default limit on `n` for a materialized `n!`.
pub const DEFAULT_FACTORIAL_BOUND: u64 = 100_000;
/// Default number of random Miller-Rabin rounds added on top of Baillie-PSW.
pub const DEFAULT_EXTRA_ROUNDS: u32 = 16;
/// Default seed for the random rounds.
pub const DEFAULT_SEED: u64 = 0x5eed_0fb5;

// Miller-Rabin with these bases is exact for every n < 3.3 * 10^24.
const DETERMINISTIC_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const SMALL_PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certainty {
    Deterministic,
    Probable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimalityVerdict {
    pub is_prime: bool,
    pub certainty: Certainty,
    /// Random Miller-Rabin rounds run; zero on the deterministic path.
    pub rounds: u32,
}

impl PrimalityVerdict {
    fn exact(is_prime: bool) -> Self {
        PrimalityVerdict { is_prime, certainty: Certainty::Deterministic, rounds: 0 }
    }
}

/// Primality test configuration for values beyond the deterministic range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimalityTest {
    pub extra_rounds: u32,
    pub seed: u64,
}

impl Default for PrimalityTest {
    fn default() -> Self {
        PrimalityTest { extra_rounds: DEFAULT_EXTRA_ROUNDS, seed: DEFAULT_SEED }
    }
}

impl PrimalityTest {
    pub fn test(&self, n: &Natural) -> PrimalityVerdict {
        if let Some(small) = n.to_u64() {
            return PrimalityVerdict::exact(is_prime_u64(small));
        }
        if n.is_even() {
            return PrimalityVerdict::exact(false);
        }
        for &p in &SMALL_PRIMES[1..] {
            if (n % p).is_zero() {
                return PrimalityVerdict::exact(false);
            }
        }
        let n_minus_1 = n - 1u32;
        let twos = n_minus_1.trailing_zeros().unwrap_or(0);
        let odd = &n_minus_1 >> twos;
        if !strong_probable_prime(n, &BigUint::from(2u32), &odd, twos)
            || !strong_lucas_probable_prime(n)
        {
            return PrimalityVerdict::exact(false);
        }
        let mut rng = StdRng::seed_from_u64(self.seed);
        let low = BigUint::from(2u32);
        let high = &n_minus_1; // exclusive: bases in [2, n-2]
        for _ in 0..self.extra_rounds {
            let a = rng.gen_biguint_range(&low, high);
            if !strong_probable_prime(n, &a, &odd, twos) {
                return PrimalityVerdict::exact(false);
            }
        }
        PrimalityVerdict {
            is_prime: true,
            certainty: Certainty::Probable,
            rounds: self.extra_rounds,
        }
    }
}

/// Primality with the default configuration.
pub fn is_prime(n: &Natural) -> PrimalityVerdict {
    PrimalityTest::default().test(n)
}

/// Exact primality for machine-word values.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 97 * 97 {
        return true;
    }
    let twos = (n - 1).trailing_zeros();
    let odd = (n - 1) >> twos;
    // Bases 2, 7, 61 are exact below 4_759_123_141.
    let bases: &[u64] = if n < 4_759_123_141 { &[2, 7, 61] } else { &DETERMINISTIC_BASES };
    'witness: for &a in bases {
        let mut x = pow_mod_u64(a % n, odd, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..twos {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime(n: &Natural, base: &Natural, odd: &Natural, twos: u64) -> bool {
    let n_minus_1 = n - 1u32;
    let mut x = base.modpow(odd, n);
    if x.is_one() || x == n_minus_1 {
        return true;
    }
    for _ in 1..twos {
        x = &x * &x % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a / n) for odd positive n.
fn jacobi(a: &Natural, n: &Natural) -> i32 {
    let mut a = a % n;
    let mut n = n.clone();
    let mut sign = 1;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % 8u32).to_u32().unwrap();
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32).to_u32() == Some(3) && (&n % 4u32).to_u32() == Some(3) {
            sign = -sign;
        }
        a %= &n;
    }
    if n.is_one() {
        sign
    } else {
        0
    }
}

fn signed_residue(value: i64, n: &Natural) -> Natural {
    let magnitude = BigUint::from(value.unsigned_abs()) % n;
    if value >= 0 || magnitude.is_zero() {
        magnitude
    } else {
        n - magnitude
    }
}

fn half_mod(x: Natural, n: &Natural) -> Natural {
    if x.is_even() {
        x >> 1
    } else {
        (x + n) >> 1
    }
}

/// Strong Lucas probable-prime test with Selfridge parameters (P = 1).
/// `n` must be odd and larger than the small-prime table.
fn strong_lucas_probable_prime(n: &Natural) -> bool {
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    let mut d: i64 = 5;
    loop {
        let dn = signed_residue(d, n);
        match jacobi(&dn, n) {
            -1 => break,
            0 if BigUint::from(d.unsigned_abs()) != *n => return false,
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let q = (1 - d) / 4;
    let d_res = signed_residue(d, n);
    let q_res = signed_residue(q, n);

    let n_plus_1 = n + 1u32;
    let twos = n_plus_1.trailing_zeros().unwrap_or(0);
    let odd = &n_plus_1 >> twos;

    let mut u = BigUint::one();
    let mut v = BigUint::one();
    let mut qk = q_res.clone();
    let bits = odd.bits();
    for i in (0..bits - 1).rev() {
        u = &u * &v % n;
        v = (&v * &v + n + n - (&qk << 1u32) % n) % n;
        qk = &qk * &qk % n;
        if odd.bit(i) {
            let next_u = half_mod(&u + &v, n);
            let next_v = half_mod(&d_res * &u + &v, n);
            u = next_u % n;
            v = next_v % n;
            qk = &qk * &q_res % n;
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..twos {
        v = (&v * &v + n + n - (&qk << 1u32) % n) % n;
        if v.is_zero() {
            return true;
        }
        qk = &qk * &qk % n;
    }
    false
}

/// `base^exp mod m` by square-and-multiply.
pub fn mod_pow(base: &Natural, exp: &Natural, m: &Natural) -> Result<Natural> {
    if m.is_zero() {
        return Err(Error::domain("modulus must be at least 1"));
    }
    Ok(base.modpow(exp, m))
}

/// Smallest `d >= 1` with `b^d = 1 (mod m)`, found by stepping through the
/// powers of `b`. Requires `m >= 2`, `gcd(b, m) = 1` and `m <= bound`.
pub fn multiplicative_order(b: &Natural, m: &Natural, bound: u64) -> Result<Natural> {
    if *m < BigUint::from(2u32) {
        return Err(Error::domain("order modulus must be at least 2"));
    }
    if !b.gcd(m).is_one() {
        return Err(Error::domain(format!("gcd({b}, {m}) != 1, order undefined")));
    }
    let modulus = match m.to_u64() {
        Some(v) if v <= bound => v,
        _ => {
            return Err(Error::Budget(Budget::OrderSearch { modulus: m.to_string(), bound }));
        }
    };
    let step = (b % m).to_u64().unwrap();
    let mut power = step;
    let mut d = 1u64;
    while power != 1 {
        power = mul_mod_u64(power, step, modulus);
        d += 1;
    }
    Ok(BigUint::from(d))
}

/// `n!` materialized in full, refused when `n > bound`.
pub fn factorial(n: &Natural, bound: u64) -> Result<Natural> {
    let limit = match n.to_u64() {
        Some(v) if v <= bound => v,
        _ => return Err(Error::Budget(Budget::Factorial { n: n.to_string(), bound })),
    };
    Ok((2..=limit).fold(BigUint::one(), |acc, i| acc * i))
}

/// `n! mod m`, computed in the residue ring without materializing `n!`.
pub fn factorial_mod(n: &Natural, m: &Natural) -> Result<Natural> {
    if m.is_zero() {
        return Err(Error::domain("modulus must be at least 1"));
    }
    // m <= n means m is one of the factors of n! (or m = 1).
    if n >= m {
        return Ok(BigUint::zero());
    }
    let count = n.to_u64().ok_or_else(|| {
        Error::Budget(Budget::Factorial { n: n.to_string(), bound: u64::MAX })
    })?;
    if let Some(small) = m.to_u64() {
        let acc = (2..=count).fold(1 % small, |acc, i| mul_mod_u64(acc, i, small));
        return Ok(BigUint::from(acc));
    }
    Ok((2..=count).fold(BigUint::one(), |acc, i| acc * i % m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(v: u64) -> Natural {
        BigUint::from(v)
    }

    fn sieve(limit: usize) -> Vec<bool> {
        let mut is = vec![true; limit];
        is[0] = false;
        is[1] = false;
        let mut i = 2;
        while i * i < limit {
            if is[i] {
                let mut j = i * i;
                while j < limit {
                    is[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        is
    }

    fn trial_division(v: u64) -> bool {
        v >= 2 && (2..).take_while(|d| d * d <= v).all(|d| !v.is_multiple_of(d))
    }

    #[test]
    fn primality_examples() {
        assert!(!is_prime(&n(0)).is_prime);
        assert!(!is_prime(&n(1)).is_prime);
        assert!(is_prime(&n(2)).is_prime);
        assert!(is_prime(&n(7681)).is_prime);
        assert!(!is_prime(&n(1537)).is_prime);
        assert_eq!(1537, 29 * 53);
        assert_eq!(is_prime(&n(7681)).certainty, Certainty::Deterministic);
    }

    #[test]
    fn agrees_with_sieve_below_one_million() {
        let table = sieve(1_000_000);
        for (v, &expected) in table.iter().enumerate() {
            assert_eq!(is_prime_u64(v as u64), expected, "{v}");
        }
    }

    #[test]
    fn word_sized_pseudoprimes_are_rejected() {
        // Strong pseudoprimes to several small bases, and Carmichael numbers.
        for v in [
            2047u64,
            3_215_031_751,
            4_759_123_141,
            1_122_004_669_633,
            3_825_123_056_546_413_051,
            561,
            41041,
            825265,
            321_197_185,
        ] {
            assert!(!is_prime_u64(v), "{v}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest prime below 2^64
        assert!(!is_prime_u64(u64::MAX));
    }

    #[test]
    fn large_values_use_probable_regime() {
        let m127 = (BigUint::one() << 127u32) - 1u32;
        let verdict = is_prime(&m127);
        assert!(verdict.is_prime);
        assert_eq!(verdict.certainty, Certainty::Probable);
        assert_eq!(verdict.rounds, DEFAULT_EXTRA_ROUNDS);

        let m67 = (BigUint::one() << 67u32) - 1u32; // 193707721 * 761838257287
        let verdict = is_prime(&m67);
        assert!(!verdict.is_prime);
        assert_eq!(verdict.certainty, Certainty::Deterministic);

        // Product of two primes just above 2^32, beyond u64.
        let semiprime = n(4_294_967_311) * n(4_294_967_357) * n(3);
        assert!(!is_prime(&semiprime).is_prime);

        let p2 = n(18_446_744_073_709_551_557) * n(18_446_744_073_709_551_557);
        assert!(!is_prime(&p2).is_prime);
    }

    #[test]
    fn windows_above_word_size() {
        // Offsets o in [0, 1000) with 2^64 + o and 10^30 + o prime, from an
        // independent computer algebra system.
        let cases: [(Natural, &[u64]); 2] = [
            (
                BigUint::one() << 64u32,
                &[13, 37, 51, 81, 93, 141, 307, 331, 393, 493, 541, 597, 637, 651, 717, 741, 745,
                  757, 805, 807, 885, 925, 961, 981, 997],
            ),
            (
                BigUint::from(10u32).pow(30u32),
                &[57, 99, 211, 231, 271, 469, 529, 577, 651, 687, 709, 751, 969],
            ),
        ];
        for (start, primes) in cases {
            let found: Vec<u64> = (0..1000u64).filter(|&o| is_prime(&(&start + o)).is_prime).collect();
            assert_eq!(found, primes);
        }
    }

    #[test]
    fn lucas_false_positives_are_the_known_pseudoprimes() {
        // Strong Lucas pseudoprimes (Selfridge parameters) in range, OEIS A217255.
        let mut fooled = Vec::new();
        for v in (10_001u64..40_000).step_by(2) {
            let lucas = strong_lucas_probable_prime(&n(v));
            let truth = trial_division(v);
            assert!(lucas || !truth, "prime {v} rejected");
            if lucas && !truth {
                fooled.push(v);
                // Baillie-PSW also requires the base-2 strong test.
                let twos = (v - 1).trailing_zeros() as u64;
                assert!(!strong_probable_prime(&n(v), &n(2), &n((v - 1) >> twos), twos));
            }
        }
        assert_eq!(fooled, [10877, 16109, 18971, 22499, 24569, 25199]);
    }

    #[test]
    fn jacobi_small_table() {
        // (a/15) for a = 1..14 via multiplicativity (a/3)(a/5).
        let legendre = |a: i64, p: i64| -> i32 {
            let r = a.rem_euclid(p);
            if r == 0 {
                0
            } else if (1..p).any(|x| x * x % p == r) {
                1
            } else {
                -1
            }
        };
        for a in 0..30u64 {
            let expected = legendre(a as i64, 3) * legendre(a as i64, 5);
            assert_eq!(jacobi(&n(a), &n(15)), expected, "a={a}");
        }
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(mod_pow(&n(2), &n(3), &n(5)).unwrap(), n(3));
        assert_eq!(mod_pow(&n(7), &n(0), &n(5)).unwrap(), n(1));
        assert_eq!(mod_pow(&n(7), &n(0), &n(1)).unwrap(), n(0));
        assert_eq!(mod_pow(&n(2), &n(24), &n(5)).unwrap(), n(1));
        assert!(matches!(mod_pow(&n(2), &n(3), &n(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn order_examples() {
        let bound = DEFAULT_ORDER_BOUND;
        assert_eq!(multiplicative_order(&n(2), &n(3), bound).unwrap(), n(2));
        assert_eq!(multiplicative_order(&n(2), &n(5), bound).unwrap(), n(4));
        for m in 2..50u64 {
            assert_eq!(multiplicative_order(&n(1), &n(m), bound).unwrap(), n(1));
        }
        assert!(matches!(multiplicative_order(&n(2), &n(4), bound), Err(Error::Domain(_))));
        assert!(matches!(multiplicative_order(&n(2), &n(1), bound), Err(Error::Domain(_))));
        assert!(matches!(
            multiplicative_order(&n(2), &n(101), 100),
            Err(Error::Budget(Budget::OrderSearch { .. }))
        ));
    }

    #[test]
    fn factorial_examples() {
        let bound = DEFAULT_FACTORIAL_BOUND;
        assert_eq!(factorial(&n(0), bound).unwrap(), n(1));
        assert_eq!(factorial(&n(6), bound).unwrap(), n(720));
        assert_eq!(factorial(&n(10), bound).unwrap(), n(3_628_800));
        assert!(factorial(&n(11), 10).unwrap_err().is_budget());

        assert_eq!(factorial_mod(&n(6), &n(7)).unwrap(), n(6));
        assert_eq!(factorial_mod(&n(1234), &n(1)).unwrap(), n(0));
        assert_eq!(factorial_mod(&n(0), &n(1)).unwrap(), n(0));
        assert_eq!(factorial_mod(&n(24), &n(4)).unwrap(), n(0));
        assert!(matches!(factorial_mod(&n(3), &n(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn factorial_mod_with_wide_modulus() {
        let m = (BigUint::one() << 100u32) + 7u32;
        let full = factorial(&n(40), DEFAULT_FACTORIAL_BOUND).unwrap();
        assert_eq!(factorial_mod(&n(40), &m).unwrap(), full % &m);
    }

    proptest! {
        #[test]
        fn mod_pow_matches_repeated_multiplication(b in 0u64..1000, e in 0u64..=1000, m in 1u64..5000) {
            let naive = (0..e).fold(1 % m, |acc, _| acc * b % m);
            prop_assert_eq!(mod_pow(&n(b), &n(e), &n(m)).unwrap(), n(naive));
        }

        #[test]
        fn order_is_minimal(b in 1u64..500, m in 2u64..2000) {
            prop_assume!(num_integer::gcd(b, m) == 1);
            let d = multiplicative_order(&n(b), &n(m), DEFAULT_ORDER_BOUND).unwrap();
            let d = d.to_u64().unwrap();
            prop_assert!(d < m);
            prop_assert_eq!(mod_pow(&n(b), &n(d), &n(m)).unwrap(), n(1));
            for j in 1..d {
                prop_assert_ne!(mod_pow(&n(b), &n(j), &n(m)).unwrap(), n(1));
            }
        }

        #[test]
        fn factorial_mod_matches_materialized(k in 0u64..200, m in 1u64..100_000) {
            let full = factorial(&n(k), DEFAULT_FACTORIAL_BOUND).unwrap();
            prop_assert_eq!(factorial_mod(&n(k), &n(m)).unwrap(), full % m);
        }

        #[test]
        fn word_primality_matches_trial_division(v in 0u64..2_000_000_000) {
            prop_assert_eq!(is_prime_u64(v), trial_division(v));
        }
    }
}
