use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use pstar_core::baseb::{digits_to_text, from_base, witness_numeral};
use pstar_core::numtheory::{is_prime, DEFAULT_ORDER_BOUND};
use pstar_core::primelang::{
    compute_fb, in_pb, in_pb_star, in_pb_star_digits, nerode_lower_bound, Language,
    DEFAULT_ENUMERATION_BOUND,
};
use pstar_core::refuter::{confirm_counterexample, find_counterexample, pumping_refutation, DfaSpec};
use pstar_core::witness::{
    certificates, direct_divisibility, lemma_witnesses, proposition_n, smallest_hard_n,
};

fn segmentations_accept(digits: &[u32], base: u32) -> bool {
    fn prime(v: u128) -> bool {
        v >= 2 && (2..).take_while(|d| d * d <= v).all(|d| !v.is_multiple_of(d))
    }
    if digits.is_empty() {
        return true;
    }
    if digits[0] == 0 {
        return false;
    }
    let mut value = 0u128;
    (1..=digits.len()).any(|end| {
        value = value * u128::from(base) + u128::from(digits[end - 1]);
        prime(value) && segmentations_accept(&digits[end..], base)
    })
}

#[test]
fn decimal_sample_matches_segmentation_oracle() {
    let mut rng = StdRng::seed_from_u64(20_240_601);
    for _ in 0..10_000 {
        let len = rng.gen_range(0..=8);
        let digits: Vec<u32> = (0..len).map(|_| rng.gen_range(0..10)).collect();
        let m = in_pb_star_digits(&digits, 10).unwrap();
        assert_eq!(m.member, segmentations_accept(&digits, 10), "{digits:?}");
    }
}

#[test]
fn definition_law() {
    for b in [2u32, 3, 5, 10, 16] {
        for n in 1..=12u64 {
            let r = compute_fb(b, n, 1_000_000).unwrap();
            let step = BigUint::from(b).pow(n as u32);
            assert!(is_prime(&r.prime_found).is_prime);
            assert_eq!(r.prime_found, &r.k_star * &step + 1u32);
            let k = r.k_star.to_u64().unwrap();
            for j in 1..k {
                assert!(!is_prime(&(BigUint::from(j) * &step + 1u32)).is_prime, "b={b} n={n} j={j}");
            }
        }
    }
}

#[test]
fn witness_families_round_trip_and_fall_outside_star() {
    for b in [2u32, 3, 10] {
        for n in 1..=12u64 {
            let family = lemma_witnesses(b, n, 1_000_000).unwrap();
            for (i, w) in family.iter().enumerate() {
                let k = BigUint::from(i as u64 + 1);
                let value = &k * BigUint::from(b).pow(n as u32) + 1u32;
                assert_eq!(from_base(&w.to_string(), b).unwrap(), value);
                assert!(!in_pb_star(&w.to_string(), b).unwrap().member, "b={b} n={n} {w}");
            }
        }
    }
}

#[test]
fn factorial_exponent_agrees_with_direct_search() {
    for (b, k_bound) in [(2u32, 1u32), (2, 2), (3, 1), (3, 2), (10, 1), (10, 3)] {
        let k_big = BigUint::from(k_bound);
        let hard = smallest_hard_n(b, &k_big, 200, 1_000_000).unwrap();
        assert!(hard.fb_at_n > k_big);
        assert!(hard.scan_log[..hard.scan_log.len() - 1].iter().all(|e| e.fb <= k_big));

        let exponent = proposition_n(b, &k_big).unwrap();
        if let Some(n) = &exponent.literal {
            assert!(BigUint::from(hard.n) <= *n);
            // The factorial route needs no prime search; when N is small the
            // search route must agree that f_b(N) > K.
            if let Some(small) = n.to_u64().filter(|&v| v <= 64) {
                assert!(compute_fb(b, small, 1_000_000).unwrap().k_star > k_big);
            }
        }
        for c in certificates(b, &k_big, DEFAULT_ORDER_BOUND).unwrap() {
            if let Some(direct) = direct_divisibility(&c, 10_000) {
                assert!(direct, "b={b} K={k_bound} k={}", c.k);
            }
        }
    }
}

#[test]
fn refutations_are_complete_for_several_bases() {
    for (b, p) in [(2u32, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (10, 1)] {
        let r = pumping_refutation(b, p, 200, 1_000_000).unwrap();
        let p = p as usize;
        assert!(r.fb_n > r.bound_k);
        assert!(r.s.len() >= p);
        assert_eq!(r.rows.len(), p * (p + 1) / 2);
        assert!(r.s_in_star);
        assert!(r.holds(), "b={b} p={p}");
        let step = BigUint::from(b).pow(r.n as u32);
        for row in &r.rows {
            assert!(!row.y.is_empty() && row.x.len() + row.y.len() <= p);
            assert_eq!(format!("{}{}{}", row.x, row.y, row.z), r.s.to_string());
            assert_eq!(row.xz, format!("{}{}", row.x, row.z));
            match &row.xz_k {
                Some(k) => {
                    assert!(*k < r.fb_n);
                    assert_eq!(from_base(&row.xz, b).unwrap(), k * &step + 1u32);
                }
                None => assert!(row.xz.starts_with('0')),
            }
            let pumped_up = format!("{}{}{}{}", row.x, row.y, row.y, row.z);
            assert_eq!(row.xyyz_in_star, in_pb_star(&pumped_up, b).unwrap().member);
        }
    }
}

#[test]
fn nerode_bounds_are_monotone() {
    for (b, lang, top) in [
        (2u32, Language::PbStar, 12u32),
        (2, Language::Pb, 12),
        (3, Language::PbStar, 7),
        (10, Language::Pb, 4),
    ] {
        let mut previous = 0;
        for len in 0..=top {
            let r = nerode_lower_bound(b, lang, len, DEFAULT_ENUMERATION_BOUND).unwrap();
            assert!(r.classes >= previous, "b={b} {lang:?} L={len}");
            previous = r.classes;
        }
    }
    let pb12 = nerode_lower_bound(2, Language::Pb, 12, DEFAULT_ENUMERATION_BOUND).unwrap();
    assert_eq!(pb12.classes, 253);
    let star1 = nerode_lower_bound(2, Language::PbStar, 1, DEFAULT_ENUMERATION_BOUND).unwrap();
    assert!(star1.classes >= 2);
}

#[test]
fn witness_numeral_length_law() {
    for b in [2u32, 7, 10, 36] {
        for n in 1..=20u64 {
            for k in [1u64, 2, 9, 10, 11, 1000, 123_456] {
                let k_digits = pstar_core::baseb::to_base(&BigUint::from(k), b).unwrap().len();
                assert_eq!(witness_numeral(b, n, &BigUint::from(k)).unwrap().len(), k_digits + n as usize);
            }
        }
    }
}

fn arb_dfa() -> impl Strategy<Value = DfaSpec> {
    (2u32..=3, 1usize..=6).prop_flat_map(|(base, states)| {
        (
            Just(base),
            Just(states),
            0..states,
            proptest::collection::vec(any::<bool>(), states),
            proptest::collection::vec(0..states, states * base as usize),
        )
            .prop_map(|(base, states, start, accept, transitions)| {
                let accepting = accept.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i);
                DfaSpec::new(base, states, start, accepting, transitions).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counterexamples_are_valid_and_shortest(dfa in arb_dfa(), star in any::<bool>()) {
        let lang = if star { Language::PbStar } else { Language::Pb };
        let search = find_counterexample(&dfa, lang, 9);
        let b = dfa.base();
        // Length-lexicographic brute force.
        let mut first = None;
        let mut level: Vec<Vec<u32>> = vec![vec![]];
        'scan: for _ in 0..=9 {
            for w in &level {
                if dfa.accepts_digits(w) != lang.accepts(w, b) {
                    first = Some(digits_to_text(w, b).unwrap());
                    break 'scan;
                }
            }
            level = level.iter().flat_map(|w| (0..b).map(move |d| [w.as_slice(), &[d]].concat())).collect();
        }
        prop_assert_eq!(search.counterexample.as_ref().map(|c| c.w.clone()), first);
        if let Some(cx) = &search.counterexample {
            prop_assert!(confirm_counterexample(&dfa, lang, cx));
        }
    }

    #[test]
    fn decompositions_are_sound(text in "[0-9a-f]{0,10}", base in 2u32..=16) {
        let digits: Option<Vec<u32>> = text.chars().map(|c| c.to_digit(16).filter(|&d| d < base)).collect();
        prop_assume!(digits.is_some());
        let m = in_pb_star(&text, base).unwrap();
        prop_assert_eq!(m.member, m.decomposition.is_some());
        if let Some(d) = m.decomposition {
            let joined: String = d.factors.iter().map(|f| f.to_string()).collect();
            prop_assert_eq!(joined, text.clone());
            for f in &d.factors {
                prop_assert!(in_pb(&f.to_string(), base).member);
            }
        }
        prop_assert_eq!(m.member, segmentations_accept(&digits.unwrap(), base));
    }

    #[test]
    fn compute_fb_is_minimal_for_random_bases(b in 2u32..=40, n in 1u64..=8) {
        let r = compute_fb(b, n, 1_000_000).unwrap();
        let step = BigUint::from(b).pow(n as u32);
        let mut candidate = &step + BigUint::one();
        let mut k = BigUint::one();
        while k < r.k_star {
            prop_assert!(!is_prime(&candidate).is_prime);
            candidate += &step;
            k += 1u32;
        }
        prop_assert!(is_prime(&candidate).is_prime);
    }
}
