//! Executable companion to the proof that the Kleene star of the base-b
//! primes is not a regular language.
//!
//! The crate computes `f_b(n)`, the least `k` with `k * b^n + 1` prime; builds
//! and checks the divisibility certificates showing `f_b(N) > K` for
//! `N = (bK)! + 1`; decides membership in `P_b` and `P_b^*`; and mechanizes
//! the pumping argument, both as an exhaustive table of decompositions for a
//! given pumping length and as a counterexample search against concrete DFAs.

pub mod baseb;
pub mod error;
pub mod numtheory;
pub mod primelang;
pub mod refuter;
mod serde_dec;
pub mod witness;

pub use error::{Budget, Error, NumeralFault, Result};
pub use numtheory::Natural;
