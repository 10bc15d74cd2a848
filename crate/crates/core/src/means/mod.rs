//! Double-precision evaluation of the bivariate means.
//!
//! Every operation canonicalizes its arguments to `(min, max)` before doing
//! any arithmetic, so `f(a, b)` and `f(b, a)` are bit-identical. Equal
//! arguments short-circuit to the argument itself.

mod derivative;
mod kernels;

use serde::{Deserialize, Serialize};

use crate::error::{MeanError, Result};

pub use derivative::{log_derivative_f1, log_derivative_f2};
pub use kernels::{
    heronian, identric, ln_unnormalized_power, power_mean, power_transform, s_mean,
    unnormalized_power,
};

/// A pair of positive, finite reals. No ordering is implied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct PositivePair {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
struct RawPair {
    a: f64,
    b: f64,
}

impl TryFrom<RawPair> for PositivePair {
    type Error = MeanError;

    fn try_from(raw: RawPair) -> Result<Self> {
        PositivePair::new(raw.a, raw.b)
    }
}

impl PositivePair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(MeanError::Domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { a, b })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    /// `(min, max)` of the pair.
    #[inline]
    pub fn canonical(&self) -> (f64, f64) {
        if self.a <= self.b {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }

    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
        }
    }
}

/// A finite exponent; used both for the order `k` of a power mean and for
/// the outer exponent `β`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Order(f64);

impl Order {
    pub const ZERO: Order = Order(0.0);
    pub const ONE: Order = Order(1.0);
    pub const TWO: Order = Order(2.0);
    pub const HALF: Order = Order(0.5);

    pub fn new(k: f64) -> Result<Self> {
        if k.is_finite() {
            Ok(Order(k))
        } else {
            Err(MeanError::Domain(format!("order must be finite, got {k}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub(crate) fn nonzero(self, what: &str) -> Result<f64> {
        if self.0 == 0.0 {
            Err(MeanError::Domain(format!(
                "{what} requires a nonzero order"
            )))
        } else {
            Ok(self.0)
        }
    }
}

impl TryFrom<f64> for Order {
    type Error = MeanError;

    fn try_from(k: f64) -> Result<Self> {
        Order::new(k)
    }
}

impl From<Order> for f64 {
    fn from(k: Order) -> f64 {
        k.0
    }
}

/// `(x, y) = (a^k, b^k)`, both positive, finite and normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTransformedPair {
    x: f64,
    y: f64,
}

impl PowerTransformedPair {
    pub(crate) fn new_unchecked(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Builds a transformed pair directly from already-lifted values.
    pub fn from_values(x: f64, y: f64) -> Result<Self> {
        let p = PositivePair::new(x, y)?;
        Ok(Self { x: p.a, y: p.b })
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn as_pair(&self) -> PositivePair {
        PositivePair {
            a: self.x,
            b: self.y,
        }
    }
}

/// Which mean (or mean-like function) to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "order")]
pub enum MeanKind {
    /// `A_k = ((a^k + b^k)/2)^{1/k}`, `A_0 = sqrt(ab)`.
    PowerMean(Order),
    /// `(a + b + sqrt(ab)) / 3`.
    Heronian,
    /// `exp((b ln b - a ln a)/(b - a) - 1)`.
    Identric,
    /// `a^{a/(a+b)} b^{b/(a+b)}`.
    SMean,
    /// `(a^k + b^k)^{1/k}`; not a mean, and the order must be nonzero.
    UnnormalizedPower(Order),
}

impl MeanKind {
    pub const ARITHMETIC: MeanKind = MeanKind::PowerMean(Order::ONE);
    pub const GEOMETRIC: MeanKind = MeanKind::PowerMean(Order::ZERO);

    /// Whether the value always lies between `min(a, b)` and `max(a, b)`.
    pub fn is_mean(&self) -> bool {
        !matches!(self, MeanKind::UnnormalizedPower(_))
    }

    pub fn validate(&self) -> Result<()> {
        if let MeanKind::UnnormalizedPower(k) = self {
            k.nonzero("unnormalized power")?;
        }
        Ok(())
    }

    /// Short human-readable label, e.g. `A_0.5` or `He`.
    pub fn label(&self) -> String {
        match self {
            MeanKind::PowerMean(k) => format!("A_{}", k.value()),
            MeanKind::Heronian => "He".into(),
            MeanKind::Identric => "I".into(),
            MeanKind::SMean => "S".into(),
            MeanKind::UnnormalizedPower(k) => format!("f2_{}", k.value()),
        }
    }
}

/// Evaluates `kind` at `p` by delegating to the matching operation.
pub fn eval_mean(kind: MeanKind, p: PositivePair) -> Result<f64> {
    match kind {
        MeanKind::PowerMean(k) => Ok(power_mean(p, k)),
        MeanKind::Heronian => Ok(heronian(p)),
        MeanKind::Identric => Ok(identric(p)),
        MeanKind::SMean => Ok(s_mean(p)),
        MeanKind::UnnormalizedPower(k) => unnormalized_power(p, k),
    }
}

/// Natural logarithm of [`eval_mean`], computed without overflow.
///
/// Only the unnormalized power can leave the double range (it grows like
/// `2^{1/k}` as `k -> 0`); it is evaluated directly in the log domain. The
/// means themselves are bounded by their arguments.
pub fn ln_eval_mean(kind: MeanKind, p: PositivePair) -> Result<f64> {
    match kind {
        MeanKind::UnnormalizedPower(k) => ln_unnormalized_power(p, k),
        _ => Ok(eval_mean(kind, p)?.ln()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_pairs() {
        for (a, b) in [
            (0.0, 1.0),
            (-1.0, 1.0),
            (f64::NAN, 1.0),
            (1.0, f64::INFINITY),
        ] {
            assert!(matches!(PositivePair::new(a, b), Err(MeanError::Domain(_))));
        }
        assert!(Order::new(f64::NAN).is_err());
        assert!(Order::new(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn aliases() {
        let p = PositivePair::new(1.0, 4.0).unwrap();
        assert_eq!(eval_mean(MeanKind::GEOMETRIC, p).unwrap(), 2.0);
        assert_eq!(eval_mean(MeanKind::ARITHMETIC, p).unwrap(), 2.5);
    }

    #[test]
    fn dispatch_examples() {
        let p14 = PositivePair::new(1.0, 4.0).unwrap();
        let p12 = PositivePair::new(1.0, 2.0).unwrap();
        assert_eq!(eval_mean(MeanKind::Heronian, p14).unwrap(), 7.0 / 3.0);
        assert_eq!(
            eval_mean(MeanKind::PowerMean(Order::ZERO), p14).unwrap(),
            2.0
        );
        let s = eval_mean(MeanKind::SMean, p12).unwrap();
        assert!((s - 2f64.powf(2.0 / 3.0)).abs() <= 2.0 * f64::EPSILON * s);
    }

    #[test]
    fn dispatch_is_bit_identical_to_direct_calls() {
        let p = PositivePair::new(0.37, 12.5).unwrap();
        let k = Order::new(-2.5).unwrap();
        assert_eq!(
            eval_mean(MeanKind::PowerMean(k), p).unwrap().to_bits(),
            power_mean(p, k).to_bits()
        );
        assert_eq!(
            eval_mean(MeanKind::Identric, p).unwrap().to_bits(),
            identric(p).to_bits()
        );
        assert_eq!(
            eval_mean(MeanKind::UnnormalizedPower(k), p)
                .unwrap()
                .to_bits(),
            unnormalized_power(p, k).unwrap().to_bits()
        );
    }

    #[test]
    fn unnormalized_power_rejects_zero_order() {
        let p = PositivePair::new(1.0, 2.0).unwrap();
        let kind = MeanKind::UnnormalizedPower(Order::ZERO);
        assert!(kind.validate().is_err());
        assert!(matches!(eval_mean(kind, p), Err(MeanError::Domain(_))));
    }

    #[test]
    fn pair_serde_validates() {
        let ok: PositivePair = serde_json::from_str(r#"{"a":1.0,"b":2.0}"#).unwrap();
        assert_eq!(ok.canonical(), (1.0, 2.0));
        assert!(serde_json::from_str::<PositivePair>(r#"{"a":-1.0,"b":2.0}"#).is_err());
    }
}
