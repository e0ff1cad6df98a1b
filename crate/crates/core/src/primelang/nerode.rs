//! Bounded Myhill-Nerode diagnostic.
//!
//! Every string of length at most `L` is assigned to the first class
//! representative it cannot be told apart from, where `u` and `v` are told
//! apart by an extension `w` with `|uw| <= L`, `|vw| <= L` and the oracle
//! answering differently on `uw` and `vw`. Representatives are pairwise
//! distinguishable, so their count bounds from below the states of any
//! complete DFA that agrees with the language on all strings up to `L`.

use num_bigint::BigUint;
use num_traits::{Pow, ToPrimitive};
use serde::Serialize;

use super::{Language, Recognizer};
use crate::baseb::check_base;
use crate::error::{Budget, Error, Result};

/// Default cap on the number of strings enumerated.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NerodeBound {
    pub base: u32,
    pub language: Language,
    pub max_len: u32,
    pub classes: u64,
    pub strings: u64,
    /// Class representatives, shortest first.
    pub representatives: Vec<String>,
}

/// Strings of length at most `max_len`, indexed by length then value.
struct Universe {
    base: u64,
    max_len: u32,
    offsets: Vec<u64>,
    powers: Vec<u64>,
}

impl Universe {
    fn index(&self, len: u32, value: u64) -> usize {
        (self.offsets[len as usize] + value) as usize
    }
}

pub fn nerode_lower_bound(
    base: u32,
    language: Language,
    max_len: u32,
    enumeration_bound: u64,
) -> Result<NerodeBound> {
    check_base(base)?;
    let total: BigUint = (0..=max_len).map(|i| BigUint::from(base).pow(i)).sum();
    let strings = match total.to_u64() {
        Some(t) if t <= enumeration_bound => t,
        _ => {
            return Err(Error::Budget(Budget::Enumeration {
                strings: total.to_string(),
                bound: enumeration_bound,
            }))
        }
    };

    let b = u64::from(base);
    let mut offsets = vec![0u64];
    let mut powers = vec![1u64];
    for i in 0..=max_len as usize {
        offsets.push(offsets[i] + powers[i]);
        powers.push(powers[i].saturating_mul(b));
    }
    let universe = Universe { base: b, max_len, offsets, powers };

    let mut accepted = vec![false; strings as usize];
    fill(&universe, &language.recognizer(base), 0, 0, &mut accepted);

    let mut reps: Vec<(u32, u64)> = Vec::new();
    for len in 0..=max_len {
        for value in 0..universe.powers[len as usize] {
            let fresh = reps
                .iter()
                .all(|&(rl, rv)| distinguishable(&universe, &accepted, (len, value), (rl, rv)));
            if fresh {
                reps.push((len, value));
            }
        }
    }

    let representatives = reps
        .iter()
        .map(|&(len, value)| render(base, len, value))
        .collect();
    Ok(NerodeBound {
        base,
        language,
        max_len,
        classes: reps.len() as u64,
        strings,
        representatives,
    })
}

fn fill(universe: &Universe, rec: &Recognizer, len: u32, value: u64, accepted: &mut [bool]) {
    accepted[universe.index(len, value)] = rec.accepting();
    if len == universe.max_len {
        return;
    }
    for d in 0..universe.base {
        let next = rec.push(d as u32);
        fill(universe, &next, len + 1, value * universe.base + d, accepted);
    }
}

fn distinguishable(universe: &Universe, accepted: &[bool], u: (u32, u64), v: (u32, u64)) -> bool {
    let residual = universe.max_len - u.0.max(v.0);
    (0..=residual).any(|wl| {
        let shift = universe.powers[wl as usize];
        (0..shift).any(|w| {
            let uw = universe.index(u.0 + wl, u.1 * shift + w);
            let vw = universe.index(v.0 + wl, v.1 * shift + w);
            accepted[uw] != accepted[vw]
        })
    })
}

fn render(base: u32, len: u32, mut value: u64) -> String {
    let mut out = vec!['0'; len as usize];
    for slot in out.iter_mut().rev() {
        *slot = crate::baseb::digit_char((value % u64::from(base)) as u32).unwrap_or('?');
        value /= u64::from(base);
    }
    out.into_iter().collect()
}
