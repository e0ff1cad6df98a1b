//! Command-line front end: argument parsing, dispatch, and report rendering.
//!
//! Exit codes: 0 affirmative result, 1 negative result, 2 usage or input
//! error, 3 budget exhausted.

use std::fs;
use std::io::{self, Read, Write};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use pstar_core::baseb::{self, MAX_TEXT_BASE};
use pstar_core::numtheory::{
    Natural, PrimalityTest, DEFAULT_EXTRA_ROUNDS, DEFAULT_FACTORIAL_BOUND, DEFAULT_ORDER_BOUND,
    DEFAULT_SEED,
};
use pstar_core::primelang::{self, Language, DEFAULT_ENUMERATION_BOUND};
use pstar_core::refuter::{self, PumpingRefutation};
use pstar_core::witness::{self, CompositenessCertificate};
use pstar_core::Error;
use serde::Serialize;
use serde_json::json;

pub const EXIT_AFFIRMATIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pstar", version, about = "Non-regularity witnesses for the Kleene star of base-b primes")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// Print tables and prose instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    /// Seed for the random primality rounds above 2^64.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random Miller-Rabin rounds on top of Baillie-PSW above 2^64.
    #[arg(long, global = true, default_value_t = DEFAULT_EXTRA_ROUNDS)]
    extra_rounds: u32,
    /// Largest k tried when searching for f_b(n).
    #[arg(long, global = true, default_value_t = 100_000)]
    k_budget: u64,
    /// Largest exponent n tried when searching for f_b(n) > K.
    #[arg(long, global = true, default_value_t = 200)]
    n_limit: u64,
    /// Largest modulus accepted by the multiplicative order search.
    #[arg(long, global = true, default_value_t = DEFAULT_ORDER_BOUND)]
    order_bound: u64,
    /// Largest n for which n! is materialized.
    #[arg(long, global = true, default_value_t = DEFAULT_FACTORIAL_BOUND)]
    factorial_bound: u64,
    /// Largest number of strings enumerated by nerode-bound.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_BOUND)]
    enumeration_bound: u64,
}

#[derive(Debug, Args)]
struct BaseArg {
    /// Numeral base, 2 to 36.
    #[arg(long, short, default_value_t = 10)]
    base: u32,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LangArg {
    /// Canonical numerals of primes.
    P,
    /// The Kleene star of P.
    Pstar,
}

impl From<LangArg> for Language {
    fn from(l: LangArg) -> Self {
        match l {
            LangArg::P => Language::Pb,
            LangArg::Pstar => Language::PbStar,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a decimal integer in base b.
    Encode {
        #[command(flatten)]
        base: BaseArg,
        value: String,
    },
    /// Read a canonical base-b numeral as a decimal integer.
    Decode {
        #[command(flatten)]
        base: BaseArg,
        numeral: String,
    },
    /// Test a decimal integer for primality.
    IsPrime { value: String },
    /// Membership in P_b.
    InP {
        #[command(flatten)]
        base: BaseArg,
        word: String,
    },
    /// Membership in P_b^* with a factorization.
    InPstar {
        #[command(flatten)]
        base: BaseArg,
        #[arg(default_value = "")]
        word: String,
    },
    /// Smallest k with k*b^n + 1 prime.
    Fb {
        #[command(flatten)]
        base: BaseArg,
        #[arg(long)]
        n: u64,
    },
    /// Smallest n with f_b(n) > K.
    HardN {
        #[command(flatten)]
        base: BaseArg,
        #[arg(long = "K")]
        bound_k: String,
    },
    /// Numerals (k*b^n + 1)_b for 1 <= k < f_b(n), each checked outside P_b^*.
    LemmaWitnesses {
        #[command(flatten)]
        base: BaseArg,
        #[arg(long)]
        n: u64,
    },
    /// Emit one divisibility certificate per k in 1..=K for N = (bK)! + 1.
    Certify {
        #[command(flatten)]
        base: BaseArg,
        #[arg(long = "K")]
        bound_k: String,
    },
    /// Check certificates read from a file or standard input.
    VerifyCert {
        #[arg(default_value = "-")]
        path: String,
    },
    /// Exhaustive pumping refutation for pumping length p.
    PumpRefute {
        #[command(flatten)]
        base: BaseArg,
        #[arg(long)]
        p: u32,
    },
    /// Shortest string where a DFA disagrees with the language.
    RefuteDfa {
        path: String,
        #[arg(long, value_enum, default_value_t = LangArg::Pstar)]
        lang: LangArg,
        #[arg(long, default_value_t = 18)]
        max_len: usize,
        /// Also build the pumping refutation with p = number of states.
        #[arg(long)]
        pump: bool,
    },
    /// Count distinguishable prefixes among strings of length <= len.
    NerodeBound {
        #[command(flatten)]
        base: BaseArg,
        #[arg(long, value_enum, default_value_t = LangArg::Pstar)]
        lang: LangArg,
        #[arg(long)]
        len: u32,
    },
}

/// Validated settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub human: bool,
    pub primality: PrimalityTest,
    pub k_budget: u64,
    pub n_limit: u64,
    pub order_bound: u64,
    pub factorial_bound: u64,
    pub enumeration_bound: u64,
}

impl TryFrom<ConfigArgs> for RunConfig {
    type Error = String;

    fn try_from(a: ConfigArgs) -> Result<Self, String> {
        for (name, v) in [
            ("--k-budget", a.k_budget),
            ("--n-limit", a.n_limit),
            ("--order-bound", a.order_bound),
            ("--factorial-bound", a.factorial_bound),
            ("--enumeration-bound", a.enumeration_bound),
        ] {
            if v == 0 {
                return Err(format!("{name} must be positive"));
            }
        }
        Ok(RunConfig {
            human: a.human,
            primality: PrimalityTest { extra_rounds: a.extra_rounds, seed: a.seed },
            k_budget: a.k_budget,
            n_limit: a.n_limit,
            order_bound: a.order_bound,
            factorial_bound: a.factorial_bound,
            enumeration_bound: a.enumeration_bound,
        })
    }
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

fn verdict(ok: bool) -> i32 {
    if ok {
        EXIT_AFFIRMATIVE
    } else {
        EXIT_NEGATIVE
    }
}

fn base_of(arg: &BaseArg) -> Result<u32, Failure> {
    if (2..=MAX_TEXT_BASE).contains(&arg.base) {
        Ok(arg.base)
    } else {
        Err(Failure::Usage(format!("--base must be between 2 and {MAX_TEXT_BASE}")))
    }
}

fn decimal(text: &str, what: &str) -> Result<Natural, Failure> {
    if text.is_empty() || !text.bytes().all(|c| c.is_ascii_digit()) {
        return Err(Failure::Usage(format!("{what} must be a decimal integer, got {text:?}")));
    }
    Ok(BigUint::from_str(text).expect("validated digits"))
}

fn positive(text: &str, what: &str) -> Result<Natural, Failure> {
    let v = decimal(text, what)?;
    if v == BigUint::ZERO {
        return Err(Failure::Usage(format!("{what} must be at least 1")));
    }
    Ok(v)
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String, Failure> {
    if path == "-" {
        let mut text = String::new();
        stdin.read_to_string(&mut text)?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))
    }
}

struct Output<'a> {
    human: bool,
    out: &'a mut dyn Write,
}

impl Output<'_> {
    fn json<T: Serialize>(&mut self, value: &T) -> io::Result<()> {
        let text = serde_json::to_string(value).map_err(io::Error::other)?;
        writeln!(self.out, "{text}")
    }

    /// JSON in machine mode, the given prose in human mode.
    fn report<T: Serialize>(&mut self, value: &T, prose: impl FnOnce() -> String) -> io::Result<()> {
        if self.human {
            let text = prose();
            write!(self.out, "{text}")?;
            if !text.ends_with('\n') {
                writeln!(self.out)?;
            }
            Ok(())
        } else {
            self.json(value)
        }
    }
}

/// Parses `args` (program name first), runs the command, and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_AFFIRMATIVE };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    let config = match RunConfig::try_from(cli.config) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let mut output = Output { human: config.human, out: stdout };
    match dispatch(&config, cli.command, stdin, &mut output) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_budget() {
                EXIT_BUDGET
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn dispatch(config: &RunConfig, command: Command, stdin: &mut dyn Read, out: &mut Output) -> Outcome {
    match command {
        Command::Encode { base, value } => {
            let b = base_of(&base)?;
            let value = decimal(&value, "value")?;
            let numeral = baseb::to_base(&value, b)?;
            out.report(
                &json!({"base": b, "value": value.to_string(), "numeral": numeral}),
                || numeral.to_string(),
            )?;
            Ok(EXIT_AFFIRMATIVE)
        }
        Command::Decode { base, numeral } => {
            let b = base_of(&base)?;
            let value = baseb::from_base(&numeral, b)?;
            out.report(
                &json!({"base": b, "numeral": numeral, "value": value.to_string()}),
                || value.to_string(),
            )?;
            Ok(EXIT_AFFIRMATIVE)
        }
        Command::IsPrime { value } => {
            let n = decimal(&value, "value")?;
            let v = config.primality.test(&n);
            out.report(
                &json!({"n": n.to_string(), "is_prime": v.is_prime, "certainty": v.certainty, "rounds": v.rounds}),
                || format!("{n}: {} ({:?})", if v.is_prime { "prime" } else { "not prime" }, v.certainty),
            )?;
            Ok(verdict(v.is_prime))
        }
        Command::InP { base, word } => {
            let b = base_of(&base)?;
            let m = primelang::in_pb_with(&config.primality, &word, b);
            out.report(
                &json!({"base": b, "word": word, "member": m.member, "reason": m.reason}),
                || match m.reason {
                    None => format!("{word:?} is in P_{b}"),
                    Some(r) => format!("{word:?} is not in P_{b}: {r:?}"),
                },
            )?;
            Ok(verdict(m.member))
        }
        Command::InPstar { base, word } => {
            let b = base_of(&base)?;
            let m = primelang::in_pb_star_with(&config.primality, &word, b)?;
            let factors: Option<Vec<String>> = m
                .decomposition
                .as_ref()
                .map(|d| d.factors.iter().map(|f| f.to_string()).collect());
            out.report(
                &json!({"base": b, "word": word, "member": m.member, "decomposition": factors}),
                || match &factors {
                    Some(f) => format!("{word:?} is in P_{b}^*: [{}]", f.join(" | ")),
                    None => format!("{word:?} is not in P_{b}^*"),
                },
            )?;
            Ok(verdict(m.member))
        }
        Command::Fb { base, n } => {
            let b = base_of(&base)?;
            let r = primelang::compute_fb_with(&config.primality, b, n, config.k_budget)?;
            out.report(&r, || {
                format!("f_{b}({n}) = {}  ({} * {b}^{n} + 1 = {} is prime)", r.k_star, r.k_star, r.prime_found)
            })?;
            Ok(EXIT_AFFIRMATIVE)
        }
        Command::HardN { base, bound_k } => {
            let b = base_of(&base)?;
            let bound_k = positive(&bound_k, "K")?;
            let r = witness::smallest_hard_n(b, &bound_k, config.n_limit, config.k_budget)?;
            out.report(&r, || {
                let mut text = String::from("n    f_b(n)\n");
                for e in &r.scan_log {
                    text.push_str(&format!("{:<4} {}\n", e.n, e.fb));
                }
                text.push_str(&format!("smallest N with f_{b}(N) > {}: N = {}\n", r.bound_k, r.n));
                text
            })?;
            Ok(EXIT_AFFIRMATIVE)
        }
        Command::LemmaWitnesses { base, n } => {
            let b = base_of(&base)?;
            let fb = primelang::compute_fb_with(&config.primality, b, n, config.k_budget)?;
            let witnesses = witness::lemma_witnesses(b, n, config.k_budget)?;
            let mut rejected = true;
            for w in &witnesses {
                rejected &= !primelang::in_pb_star_digits(w.digits(), b)?.member;
            }
            out.report(
                &json!({
                    "base": b, "n": n, "fb": fb.k_star.to_string(),
                    "witnesses": witnesses, "all_rejected": rejected,
                }),
                || {
                    let mut text = format!("f_{b}({n}) = {}\n", fb.k_star);
                    for (k, w) in witnesses.iter().enumerate() {
                        text.push_str(&format!("k = {:<4} {w}  not in P_{b}^*\n", k + 1));
                    }
                    text
                },
            )?;
            Ok(verdict(rejected))
        }
        Command::Certify { base, bound_k } => {
            let b = base_of(&base)?;
            let bound_k = positive(&bound_k, "K")?;
            let certs = witness::certificates(b, &bound_k, config.order_bound)?;
            let mut all_valid = true;
            for c in &certs {
                let valid = witness::verify_certificate(c, config.order_bound).is_ok();
                all_valid &= valid;
                if out.human {
                    writeln!(
                        out.out,
                        "k = {}: {} | {} * {}^N + 1 with N = {}, ord = {}, N mod ord = {}{}",
                        c.k, c.modulus, c.k, c.base, c.exponent, c.order, c.residue,
                        if valid { "" } else { "  INVALID" }
                    )?;
                } else {
                    out.json(c)?;
                }
            }
            Ok(verdict(all_valid))
        }
        Command::VerifyCert { path } => {
            let text = read_input(&path, stdin)?;
            let certs = witness::parse_certificates(&text)?;
            if certs.is_empty() {
                return Err(Failure::Usage("no certificates in input".into()));
            }
            let mut all_valid = true;
            for c in &certs {
                let result = witness::verify_certificate(c, config.order_bound);
                all_valid &= result.is_ok();
                report_check(out, c, &result)?;
            }
            Ok(verdict(all_valid))
        }
        Command::PumpRefute { base, p } => {
            let b = base_of(&base)?;
            let r = refuter::pumping_refutation(b, p, config.n_limit, config.k_budget)?;
            let holds = r.holds();
            out.report(&json!({"refutation": &r, "holds": holds}), || render_refutation(&r))?;
            Ok(verdict(holds))
        }
        Command::RefuteDfa { path, lang, max_len, pump } => {
            let text = read_input(&path, stdin)?;
            let dfa = refuter::parse_dfa(&text)?;
            if dfa.base() > MAX_TEXT_BASE {
                return Err(Failure::Usage(format!("DFA base must be at most {MAX_TEXT_BASE}")));
            }
            let language = Language::from(lang);
            let search = refuter::find_counterexample(&dfa, language, max_len);
            let pumping = if pump {
                let p = u32::try_from(dfa.state_count())
                    .map_err(|_| Failure::Usage("too many states".into()))?;
                Some(refuter::pumping_refutation(dfa.base(), p, config.n_limit, config.k_budget)?)
            } else {
                None
            };
            out.report(&json!({"search": &search, "pumping": &pumping}), || {
                let mut text = match &search.counterexample {
                    Some(cx) => format!(
                        "counterexample {:?} (length {}): DFA {}, oracle {}\n",
                        cx.w,
                        cx.length,
                        if cx.dfa_verdict { "accepts" } else { "rejects" },
                        if cx.oracle_verdict { "accepts" } else { "rejects" }
                    ),
                    None => format!(
                        "no disagreement among {} strings of length <= {}\n",
                        search.strings_checked, search.max_len
                    ),
                };
                if let Some(r) = &pumping {
                    text.push_str(&render_refutation(r));
                }
                text
            })?;
            Ok(if search.counterexample.is_some() { EXIT_AFFIRMATIVE } else { EXIT_BUDGET })
        }
        Command::NerodeBound { base, lang, len } => {
            let b = base_of(&base)?;
            let r = primelang::nerode_lower_bound(b, lang.into(), len, config.enumeration_bound)?;
            out.report(&r, || {
                format!(
                    "{} pairwise distinguishable prefixes among {} strings of length <= {len}",
                    r.classes, r.strings
                )
            })?;
            Ok(EXIT_AFFIRMATIVE)
        }
    }
}

fn report_check(
    out: &mut Output,
    c: &CompositenessCertificate,
    result: &Result<(), witness::CertificateViolation>,
) -> io::Result<()> {
    let violation = result.as_ref().err();
    out.report(
        &json!({
            "b": c.base.to_string(),
            "K": c.bound_k.to_string(),
            "k": c.k.to_string(),
            "valid": result.is_ok(),
            "violated": violation.map(|v| v.invariant()),
            "detail": violation.map(|v| v.to_string()),
        }),
        || match violation {
            None => format!("b = {}, K = {}, k = {}: valid", c.base, c.bound_k, c.k),
            Some(v) => format!("b = {}, K = {}, k = {}: INVALID ({v})", c.base, c.bound_k, c.k),
        },
    )
}

/// The decomposition table as aligned text columns.
pub fn render_refutation(r: &PumpingRefutation) -> String {
    let mut text = format!(
        "p = {}, K = b^p = {}, N = {}, f_{}(N) = {}\ns = {} ({})\n\n",
        r.p,
        r.bound_k,
        r.n,
        r.base,
        r.fb_n,
        r.s,
        if r.s_in_star { "in P*" } else { "NOT in P*" }
    );
    let width = |f: fn(&refuter::PumpingRow) -> &str, head: &str| {
        r.rows.iter().map(|row| f(row).len()).chain([head.len()]).max().unwrap_or(0)
    };
    let (wx, wy, wz, wxz) = (
        width(|r| &r.x, "x"),
        width(|r| &r.y, "y"),
        width(|r| &r.z, "z"),
        width(|r| &r.xz, "xz"),
    );
    text.push_str(&format!(
        "{:<wx$} | {:<wy$} | {:<wz$} | {:<wxz$} | verdict\n",
        "x", "y", "z", "xz"
    ));
    for row in &r.rows {
        let verdict = match (&row.xz_k, row.xz_in_star) {
            (_, true) => "ACCEPTED".to_string(),
            (Some(k), false) => format!("rejected (k = {k})"),
            (None, false) => "rejected (leading zero)".to_string(),
        };
        text.push_str(&format!(
            "{:<wx$} | {:<wy$} | {:<wz$} | {:<wxz$} | {verdict}\n",
            row.x, row.y, row.z, row.xz
        ));
    }
    text.push_str(if r.holds() { "\nevery pumped-down string leaves P*\n" } else { "\nrefutation FAILED\n" });
    text
}
