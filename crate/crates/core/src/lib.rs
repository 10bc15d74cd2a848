//! Bivariate means and machine-checkable inequalities between them.
//!
//! The crate is organised in four layers:
//!
//! * [`means`] evaluates the power means `A_k`, the Heronian, identric and
//!   S-means, the unnormalized power function `(a^k + b^k)^{1/k}` and the
//!   logarithmic derivatives of the two power families, all in `f64`.
//! * [`extended`] re-evaluates the same quantities in double-double
//!   arithmetic (about 32 significant digits) through independent formulas.
//!   It is the oracle used to adjudicate floating-point noise.
//! * [`catalog`] declares every inequality as data and turns a point into a
//!   signed, normalized margin.
//! * [`verifier`] searches for counterexamples and scans monotonicity,
//!   derivative consistency and tightness of constants.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod catalog;
pub mod error;
pub mod extended;
pub mod means;
pub mod verifier;

pub use catalog::{
    catalog, check, lookup, margin, InequalitySpec, MarginReport, MeanExpr, Params, Point, Verdict,
};
pub use error::{MeanError, VerifyError};
pub use extended::{extended_eval, DoubleDouble};
pub use means::{
    eval_mean, heronian, identric, ln_eval_mean, log_derivative_f1, log_derivative_f2, power_mean,
    power_transform, s_mean, unnormalized_power, MeanKind, Order, PositivePair,
    PowerTransformedPair,
};
pub use verifier::{
    derivative_consistency, falsify, monotonicity_scan, oracle_compare, tightness_scan,
    FalsificationReport, Interval, MonotonicityTarget, SearchBox, TightnessPath, TightnessSeries,
    VerifierConfig,
};

/// Default relative tolerance separating a genuine margin from rounding noise.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
