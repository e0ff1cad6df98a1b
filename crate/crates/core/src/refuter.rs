//! Pumping-lemma refutations for `P_b^*` and counterexample search against
//! concrete DFAs.
//!
//! DFA text format, one directive per line, `#` lines are comments:
//!
//! ```text
//! base 2
//! states 2
//! start 0
//! accept 1
//! trans 0 0 0
//! trans 0 1 1
//! trans 1 0 0
//! trans 1 1 1
//! ```
//!
//! Exactly `states * base` `trans` lines follow the header, one per
//! `(state, digit)` pair.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{Pow, Zero};
use serde::Serialize;

use crate::baseb::{check_base, digits_to_text, parse_digits, witness_numeral, CanonicalNumeral};
use crate::error::{Error, Result};
use crate::numtheory::Natural;
use crate::primelang::{in_pb_star_digits, Language, Recognizer};
use crate::witness::{smallest_hard_n, ScanEntry};

/// A complete DFA over the digit alphabet `{0, ..., base - 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfaSpec {
    base: u32,
    state_count: usize,
    start: usize,
    accepting: BTreeSet<usize>,
    /// Row-major: `transitions[state * base + digit]`.
    transitions: Vec<usize>,
}

impl DfaSpec {
    pub fn new(
        base: u32,
        state_count: usize,
        start: usize,
        accepting: impl IntoIterator<Item = usize>,
        transitions: Vec<usize>,
    ) -> Result<Self> {
        check_base(base)?;
        if state_count == 0 {
            return Err(Error::DfaInvalid("a DFA needs at least one state".into()));
        }
        if start >= state_count {
            return Err(Error::DfaInvalid(format!("start state {start} out of range")));
        }
        let accepting: BTreeSet<usize> = accepting.into_iter().collect();
        if let Some(s) = accepting.iter().find(|&&s| s >= state_count) {
            return Err(Error::DfaInvalid(format!("accepting state {s} out of range")));
        }
        if transitions.len() != state_count * base as usize {
            return Err(Error::DfaInvalid(format!(
                "expected {} transitions, got {}",
                state_count * base as usize,
                transitions.len()
            )));
        }
        if let Some(t) = transitions.iter().find(|&&t| t >= state_count) {
            return Err(Error::DfaInvalid(format!("target state {t} out of range")));
        }
        Ok(DfaSpec { base, state_count, start, accepting, transitions })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting.contains(&state)
    }

    pub fn step(&self, state: usize, digit: u32) -> usize {
        self.transitions[state * self.base as usize + digit as usize]
    }

    /// Runs the automaton on digit values, which must all be below the base.
    pub fn accepts_digits(&self, digits: &[u32]) -> bool {
        let end = digits.iter().fold(self.start, |s, &d| self.step(s, d));
        self.is_accepting(end)
    }

    /// Serializes to the line-oriented text format read by [`parse_dfa`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "base {}", self.base);
        let _ = writeln!(out, "states {}", self.state_count);
        let _ = writeln!(out, "start {}", self.start);
        out.push_str("accept");
        for s in &self.accepting {
            let _ = write!(out, " {s}");
        }
        out.push('\n');
        for state in 0..self.state_count {
            for digit in 0..self.base {
                let _ = writeln!(out, "trans {state} {digit} {}", self.step(state, digit));
            }
        }
        out
    }
}

/// Parses and validates the DFA text format.
pub fn parse_dfa(text: &str) -> Result<DfaSpec> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut header = |keyword: &str| -> Result<(usize, Vec<usize>)> {
        let (line, content) = lines.next().ok_or_else(|| Error::DfaSyntax {
            line: text.lines().count() + 1,
            message: format!("missing `{keyword}` line"),
        })?;
        let mut fields = content.split_whitespace();
        if fields.next() != Some(keyword) {
            return Err(Error::DfaSyntax { line, message: format!("expected `{keyword}`") });
        }
        let values = fields
            .map(|f| {
                f.parse::<usize>().map_err(|_| Error::DfaSyntax {
                    line,
                    message: format!("`{f}` is not a non-negative integer"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((line, values))
    };

    let single = |(line, values): (usize, Vec<usize>), keyword: &str| -> Result<usize> {
        match values.as_slice() {
            [v] => Ok(*v),
            _ => Err(Error::DfaSyntax { line, message: format!("`{keyword}` takes one value") }),
        }
    };

    let (base_line, base_values) = header("base")?;
    let base = single((base_line, base_values), "base")?;
    let base = u32::try_from(base)
        .ok()
        .filter(|&b| b >= 2)
        .ok_or_else(|| Error::DfaSyntax { line: base_line, message: "base must be at least 2".into() })?;
    let (states_line, states_values) = header("states")?;
    let state_count = single((states_line, states_values), "states")?;
    if state_count == 0 {
        return Err(Error::DfaSyntax { line: states_line, message: "need at least one state".into() });
    }
    let (start_line, start_values) = header("start")?;
    let start = single((start_line, start_values), "start")?;
    if start >= state_count {
        return Err(Error::DfaSyntax {
            line: start_line,
            message: format!("start state {start} out of range"),
        });
    }
    let (accept_line, accepting) = header("accept")?;
    if let Some(s) = accepting.iter().find(|&&s| s >= state_count) {
        return Err(Error::DfaSyntax {
            line: accept_line,
            message: format!("accepting state {s} out of range"),
        });
    }

    let mut table: Vec<Option<usize>> = vec![None; state_count * base as usize];
    for (line, content) in lines {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.first() != Some(&"trans") {
            return Err(Error::DfaSyntax { line, message: "expected `trans`".into() });
        }
        let nums = fields[1..]
            .iter()
            .map(|f| {
                f.parse::<usize>().map_err(|_| Error::DfaSyntax {
                    line,
                    message: format!("`{f}` is not a non-negative integer"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let [state, digit, target] = nums[..] else {
            return Err(Error::DfaSyntax { line, message: "`trans` takes three values".into() });
        };
        if state >= state_count {
            return Err(Error::DfaSyntax { line, message: format!("state {state} out of range") });
        }
        if digit >= base as usize {
            return Err(Error::DfaSyntax { line, message: format!("digit {digit} out of range") });
        }
        if target >= state_count {
            return Err(Error::DfaSyntax {
                line,
                message: format!("target state {target} out of range"),
            });
        }
        let slot = &mut table[state * base as usize + digit];
        if slot.is_some() {
            return Err(Error::DfaSyntax {
                line,
                message: format!("duplicate transition for ({state}, {digit})"),
            });
        }
        *slot = Some(target);
    }

    let transitions = table
        .iter()
        .enumerate()
        .map(|(i, t)| {
            t.ok_or_else(|| {
                Error::DfaInvalid(format!(
                    "incomplete transition table: no transition for ({}, {})",
                    i / base as usize,
                    i % base as usize
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DfaSpec::new(base, state_count, start, accepting, transitions)
}

/// Runs a DFA on a text string over its digit alphabet.
pub fn dfa_accepts(dfa: &DfaSpec, text: &str) -> Result<bool> {
    let digits = parse_digits(text, dfa.base)?;
    Ok(dfa.accepts_digits(&digits))
}

/// The DFA whose states are the strings of length at most `depth` plus one
/// rejecting sink. It agrees with `language` on every string up to `depth`.
pub fn truncated_dfa(base: u32, language: Language, depth: u32) -> Result<DfaSpec> {
    check_base(base)?;
    let b = base as usize;
    let mut count = 0usize;
    let mut width = 1usize;
    for _ in 0..=depth {
        count = count
            .checked_add(width)
            .ok_or_else(|| Error::domain("truncation depth too large"))?;
        width = width.saturating_mul(b);
    }
    let sink = count;
    let mut transitions = vec![sink; (count + 1) * b];
    let mut accepting = Vec::new();
    // States are numbered breadth-first; children of state i are i*b+1..=i*b+b.
    let mut frontier = vec![(0usize, language.recognizer(base))];
    for level in 0..=depth {
        let mut next = Vec::new();
        for (state, rec) in frontier {
            if rec.accepting() {
                accepting.push(state);
            }
            if level < depth {
                for d in 0..base {
                    let child = state * b + 1 + d as usize;
                    transitions[state * b + d as usize] = child;
                    next.push((child, rec.push(d)));
                }
            }
        }
        frontier = next;
    }
    DfaSpec::new(base, count + 1, 0, accepting, transitions)
}

fn render(digits: &[u32], base: u32) -> String {
    digits_to_text(digits, base).unwrap_or_else(|| format!("{digits:?}"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub w: String,
    pub dfa_verdict: bool,
    pub oracle_verdict: bool,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleSearch {
    pub base: u32,
    pub language: Language,
    pub states: usize,
    pub max_len: usize,
    pub strings_checked: u64,
    /// `None` means no disagreement up to `max_len`, not equivalence.
    pub counterexample: Option<Counterexample>,
}

/// Shortest string (then lexicographically first) on which the DFA and the
/// language oracle disagree, among strings of length at most `max_len`.
pub fn find_counterexample(dfa: &DfaSpec, language: Language, max_len: usize) -> CounterexampleSearch {
    struct Walk<'a> {
        dfa: &'a DfaSpec,
        max_len: usize,
        checked: u64,
        best: Option<(Vec<u32>, bool, bool)>,
        path: Vec<u32>,
    }

    impl Walk<'_> {
        fn visit(&mut self, state: usize, rec: &Recognizer) {
            self.checked += 1;
            let dfa_verdict = self.dfa.is_accepting(state);
            let oracle_verdict = rec.accepting();
            if dfa_verdict != oracle_verdict
                && self.best.as_ref().is_none_or(|(w, _, _)| self.path.len() < w.len())
            {
                self.best = Some((self.path.clone(), dfa_verdict, oracle_verdict));
            }
            let depth = self.path.len();
            if depth >= self.max_len
                || self.best.as_ref().is_some_and(|(w, _, _)| depth + 1 >= w.len())
            {
                return;
            }
            for d in 0..self.dfa.base {
                self.path.push(d);
                self.visit(self.dfa.step(state, d), &rec.push(d));
                self.path.pop();
            }
        }
    }

    let mut walk = Walk { dfa, max_len, checked: 0, best: None, path: Vec::new() };
    walk.visit(dfa.start, &language.recognizer(dfa.base));
    CounterexampleSearch {
        base: dfa.base,
        language,
        states: dfa.state_count,
        max_len,
        strings_checked: walk.checked,
        counterexample: walk.best.map(|(w, dfa_verdict, oracle_verdict)| Counterexample {
            length: w.len(),
            w: render(&w, dfa.base),
            dfa_verdict,
            oracle_verdict,
        }),
    }
}

/// Re-runs both sides on a reported counterexample.
pub fn confirm_counterexample(dfa: &DfaSpec, language: Language, cx: &Counterexample) -> bool {
    let Ok(digits) = parse_digits(&cx.w, dfa.base) else {
        return false;
    };
    let dfa_verdict = dfa.accepts_digits(&digits);
    let oracle_verdict = language.accepts(&digits, dfa.base);
    dfa_verdict == cx.dfa_verdict && oracle_verdict == cx.oracle_verdict && dfa_verdict != oracle_verdict
}

/// One decomposition `s = xyz` with `|xy| <= p`, `|y| >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PumpingRow {
    pub x: String,
    pub y: String,
    pub z: String,
    /// `xz`, the pumped-down string.
    pub xz: String,
    /// `k` with `xz = (k * b^N + 1)_b`; absent when `xz` starts with 0.
    #[serde(serialize_with = "serialize_opt_dec")]
    pub xz_k: Option<Natural>,
    pub xz_in_star: bool,
    /// Membership of `xyyz`, recorded for reference only.
    pub xyyz_in_star: bool,
}

fn serialize_opt_dec<S: serde::Serializer>(
    value: &Option<Natural>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    match value {
        Some(v) => ser.collect_str(v),
        None => ser.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PumpingRefutation {
    pub base: u32,
    pub p: u32,
    /// `b^p`, the bound `f_b(N)` must exceed.
    #[serde(rename = "K", with = "crate::serde_dec")]
    pub bound_k: Natural,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "fbN", with = "crate::serde_dec")]
    pub fb_n: Natural,
    /// `(f_b(N))_b 0^(N-1) 1`.
    pub s: CanonicalNumeral,
    pub s_in_star: bool,
    pub rows: Vec<PumpingRow>,
    pub scan_log: Vec<ScanEntry>,
}

impl PumpingRefutation {
    /// The witness is in `P_b^*` and every pumped-down string is not.
    pub fn holds(&self) -> bool {
        self.s_in_star && self.rows.iter().all(|r| !r.xz_in_star)
    }
}

/// Mechanizes the pumping argument for a claimed pumping length `p`.
///
/// Finds `N` with `f_b(N) > b^p`, so `(f_b(N))_b` has at least `p + 1`
/// digits and every `y` with `|xy| <= p` lies inside it. Removing `y` leaves
/// the numeral of `k * b^N + 1` for some `k < f_b(N)`, which the oracle must
/// reject.
pub fn pumping_refutation(base: u32, p: u32, n_limit: u64, k_budget: u64) -> Result<PumpingRefutation> {
    check_base(base)?;
    if p == 0 {
        return Err(Error::domain("pumping length must be at least 1"));
    }
    let bound_k: Natural = BigUint::from(base).pow(p);
    let hard = smallest_hard_n(base, &bound_k, n_limit, k_budget)?;
    let s = witness_numeral(base, hard.n, &hard.fb_at_n)?;
    let digits = s.digits();
    let s_in_star = in_pb_star_digits(digits, base)?.member;
    let step: Natural = BigUint::from(base).pow(
        u32::try_from(hard.n).map_err(|_| Error::domain("exponent too large"))?,
    );

    let p = p as usize;
    let mut rows = Vec::with_capacity(p * (p + 1) / 2);
    for xy in 1..=p.min(digits.len()) {
        for x in 0..xy {
            let (head, rest) = digits.split_at(x);
            let (mid, tail) = rest.split_at(xy - x);
            let pumped_down: Vec<u32> = head.iter().chain(tail).copied().collect();
            let pumped_up: Vec<u32> = head.iter().chain(mid).chain(mid).chain(tail).copied().collect();
            let xz_k = match pumped_down.first() {
                Some(&d) if d != 0 => {
                    let value = CanonicalNumeral::from_digits(pumped_down.clone(), base)?.value();
                    let (k, rem) = (value - 1u32).div_rem(&step);
                    rem.is_zero().then_some(k)
                }
                _ => None,
            };
            rows.push(PumpingRow {
                x: render(head, base),
                y: render(mid, base),
                z: render(tail, base),
                xz: render(&pumped_down, base),
                xz_k,
                xz_in_star: in_pb_star_digits(&pumped_down, base)?.member,
                xyyz_in_star: in_pb_star_digits(&pumped_up, base)?.member,
            });
        }
    }

    Ok(PumpingRefutation {
        base,
        p: p as u32,
        bound_k,
        n: hard.n,
        fb_n: hard.fb_at_n,
        s,
        s_in_star,
        rows,
        scan_log: hard.scan_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ENDS_IN_ONE: &str = "\
# odd binary numbers
base 2
states 2
start 0
accept 1
trans 0 0 0
trans 0 1 1
trans 1 0 0
trans 1 1 1
";

    fn sink(accepting: bool) -> DfaSpec {
        DfaSpec::new(2, 1, 0, accepting.then_some(0), vec![0, 0]).unwrap()
    }

    #[test]
    fn parse_valid_dfa() {
        let dfa = parse_dfa(ENDS_IN_ONE).unwrap();
        assert_eq!(dfa.state_count(), 2);
        assert!(!dfa_accepts(&dfa, "10").unwrap());
        assert!(dfa_accepts(&dfa, "11").unwrap());
        assert!(!dfa_accepts(&dfa, "").unwrap());
        assert_eq!(parse_dfa(&dfa.to_text()).unwrap(), dfa);

        let all = parse_dfa("base 2\nstates 2\nstart 0\naccept 0 1\ntrans 0 0 1\ntrans 0 1 1\ntrans 1 0 0\ntrans 1 1 0\n").unwrap();
        assert!(dfa_accepts(&all, "").unwrap());
        assert!(dfa_accepts(&all, "0110").unwrap());
    }

    #[test]
    fn parse_errors() {
        let missing = ENDS_IN_ONE.replace("trans 1 1 1\n", "");
        match parse_dfa(&missing) {
            Err(Error::DfaInvalid(msg)) => assert!(msg.contains("incomplete"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        let bad_target = ENDS_IN_ONE.replace("trans 1 1 1", "trans 1 1 2");
        match parse_dfa(&bad_target) {
            Err(Error::DfaSyntax { line: 9, message }) => assert!(message.contains("out of range")),
            other => panic!("unexpected {other:?}"),
        }
        let bad_keyword = ENDS_IN_ONE.replace("start 0", "begin 0");
        assert!(matches!(parse_dfa(&bad_keyword), Err(Error::DfaSyntax { line: 4, .. })));
        let duplicate = format!("{ENDS_IN_ONE}trans 0 0 1\n");
        assert!(matches!(parse_dfa(&duplicate), Err(Error::DfaSyntax { line: 10, .. })));
        assert!(matches!(parse_dfa("base 2\nstates 1\n"), Err(Error::DfaSyntax { .. })));
        assert!(matches!(parse_dfa("base x\n"), Err(Error::DfaSyntax { line: 1, .. })));
        assert!(matches!(
            parse_dfa(&ENDS_IN_ONE.replace("trans 0 1 1", "trans 0 2 1")),
            Err(Error::DfaSyntax { line: 7, .. })
        ));
    }

    #[test]
    fn dfa_accepts_examples() {
        assert!(dfa_accepts(&sink(true), "").unwrap());
        assert!(!dfa_accepts(&sink(false), "").unwrap());
        assert!(dfa_accepts(&sink(true), "101100").unwrap());
        assert!(dfa_accepts(&sink(true), "102").is_err());
    }

    #[test]
    fn trivial_counterexamples() {
        let r = find_counterexample(&sink(true), Language::PbStar, 18);
        let cx = r.counterexample.unwrap();
        assert_eq!((cx.w.as_str(), cx.dfa_verdict, cx.oracle_verdict), ("0", true, false));

        let r = find_counterexample(&sink(false), Language::PbStar, 18);
        let cx = r.counterexample.unwrap();
        assert_eq!((cx.w.as_str(), cx.length), ("", 0));

        // P_2 rejects the empty word and "0", "1"; "10" is the first prime.
        let r = find_counterexample(&sink(false), Language::Pb, 18);
        assert_eq!(r.counterexample.unwrap().w, "10");
    }

    #[test]
    fn truncated_dfa_agrees_up_to_depth() {
        let dfa = truncated_dfa(2, Language::PbStar, 6).unwrap();
        assert_eq!(dfa.state_count(), 128);
        let r = find_counterexample(&dfa, Language::PbStar, 6);
        assert!(r.counterexample.is_none());
        let r = find_counterexample(&dfa, Language::PbStar, 18);
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.length, 7);
        assert!(confirm_counterexample(&dfa, Language::PbStar, &cx));
    }

    #[test]
    fn shortest_is_lexicographically_first() {
        let dfa = parse_dfa(ENDS_IN_ONE).unwrap();
        let r = find_counterexample(&dfa, Language::PbStar, 10);
        let cx = r.counterexample.unwrap();
        // brute force in length-lex order
        let mut expected = None;
        'outer: for len in 0..=10u32 {
            for v in 0..(1u32 << len) {
                let digits: Vec<u32> = (0..len).rev().map(|i| (v >> i) & 1).collect();
                if dfa.accepts_digits(&digits) != Language::PbStar.accepts(&digits, 2) {
                    expected = Some(render(&digits, 2));
                    break 'outer;
                }
            }
        }
        assert_eq!(Some(cx.w), expected);
    }

    #[test]
    fn pumping_examples() {
        let r = pumping_refutation(2, 1, 20, 100).unwrap();
        assert_eq!((r.n, r.fb_n.clone()), (5, BigUint::from(3u32)));
        assert_eq!(r.s.to_string(), "1100001");
        assert_eq!(r.rows.len(), 1);
        assert_eq!((r.rows[0].x.as_str(), r.rows[0].y.as_str(), r.rows[0].xz.as_str()), ("", "1", "100001"));
        assert!(r.holds());

        let r = pumping_refutation(2, 2, 20, 100).unwrap();
        assert_eq!((r.n, r.fb_n.clone()), (9, BigUint::from(15u32)));
        assert_eq!(r.s.to_string(), "1111000000001");
        assert_eq!(r.rows.len(), 3);
        assert!(r.s_in_star);
        assert!(r.holds());
        for row in &r.rows {
            let k = row.xz_k.clone().unwrap();
            assert!(k >= BigUint::from(1u32) && k < r.fb_n);
        }
    }

    #[test]
    fn pumping_domain_errors() {
        assert!(pumping_refutation(2, 0, 20, 100).is_err());
        assert!(pumping_refutation(1, 1, 20, 100).is_err());
        assert!(pumping_refutation(2, 2, 5, 100).unwrap_err().is_budget());
    }
}
