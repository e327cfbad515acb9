//! Search, verification and bound calculus for S-Diophantine tuples.
//!
//! An m-tuple `a_1 < ... < a_m` of positive integers is *S-Diophantine* when
//! every `a_i a_j + 1` has all of its prime divisors in a fixed finite prime
//! set `S`. The crate is organized by capability:
//!
//! - [`smooth`]: prime sets, factorization over `S`, S-free parts, ordered
//!   enumeration of S-smooth integers.
//! - [`tuple_search`]: bounded exhaustive search for S-Diophantine tuples via
//!   a compatibility graph, plus a direct oracle.
//! - [`sunit_system`]: the six shifted products of a quadruple, the S-unit
//!   system they satisfy, vanishing-subsum classification, quadruple
//!   recovery and the exponent scans behind the `{2, p}` case.
//! - [`sunit_solver`]: height-bounded exhaustive solver for n-term S-unit
//!   equations with exact degeneracy flags.
//! - [`bounds`]: exact and log-domain evaluation of the explicit solution
//!   count bounds and the resulting quadruple counts.
//! - [`cli`]: the `sdioph` command-line front end.
//!
//! Runnable walkthroughs live in `examples/`; see the README.

pub mod bounds;
pub mod cli;
pub mod smooth;
pub mod subsum;
pub mod sunit_solver;
pub mod sunit_system;
pub mod tuple_search;

pub use smooth::{ExponentVector, PrimeSet, SUnitValue};
pub use tuple_search::{SearchConfig, Tuple};

/// Default ceiling on grid points, candidate checks and trial-division steps.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`] for the CLI.
pub const BUDGET_ENV: &str = "SDIOPH_BUDGET";

/// Budget from `SDIOPH_BUDGET`, falling back to [`DEFAULT_BUDGET`].
///
/// Returns an error message when the variable is set but not a decimal integer.
pub fn budget_from_env() -> Result<u64, String> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| format!("{BUDGET_ENV} must be a decimal integer, got {v:?}")),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}
