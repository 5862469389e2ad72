//! Exact values of the Fabius function at dyadic rationals.
//!
//! The Fabius function `f` is the continuous function on `[0, ∞)` with
//! `f(x) + f(1 - x) = 1` on `[0, 1]` and `f(x) = ∫₀^{2x} f(t) dt`. At every
//! dyadic rational its value is rational; this crate computes those values
//! exactly from a table of scaled sum/difference polynomial identities, and
//! cross-checks them against an independent piecewise-polynomial CDF oracle.
//!
//! ```
//! use fabius_core::{DyadicRational, Evaluator, ExactRational};
//!
//! let f = Evaluator::new();
//! let x: DyadicRational = "5/16".parse().unwrap();
//! assert_eq!(f.eval_unit(&x).unwrap(), ExactRational::ratio(305857, 2073600));
//! ```

pub mod error;
pub mod evaluator;
pub mod golden;
pub mod identity;
pub mod number;
pub mod oracle;
pub mod verify;

pub use error::{NumberError, OracleError, TableError};
pub use evaluator::{thue_morse, ApproxResult, Evaluator, FabiusValue, MemoCache};
pub use identity::{eval_diff, eval_sum, seed, step, DiffIdentity, IdentityTable, SumIdentity};
pub use number::{normalize_dyadic, parse_real_literal, DyadicRational, ExactRational};
pub use oracle::{bracket, truncated_cdf, PiecewisePolynomialCDF};
pub use verify::{verify_golden, verify_identities, verify_oracle, VerificationReport};
