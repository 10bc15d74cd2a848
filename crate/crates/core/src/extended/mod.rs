//! Extended-precision oracle.
//!
//! Re-evaluates every mean with double-double arithmetic using the textbook
//! formulas (no factoring of the maximum, no `expm1`/`log1p` rewriting), so
//! that disagreements with [`crate::means`] expose errors in either path.
//! The only transformation applied is an exact power-of-two rescaling of
//! both arguments, which keeps `x^k` in range. All evaluators work on
//! logarithms first; values are recovered with one final `exp`.

mod dd;

pub use dd::DoubleDouble;

use crate::error::{MeanError, Result};
use crate::means::{MeanKind, PositivePair};

type DD = DoubleDouble;

fn finite(v: DD, what: &str) -> Result<DD> {
    if v.is_finite() && !v.hi().is_nan() {
        Ok(v)
    } else {
        Err(MeanError::Range(format!(
            "{what} is not representable in extended precision"
        )))
    }
}

/// `x^k` as `exp(k ln x)`.
fn pow(x: DD, k: f64) -> DD {
    (x.ln() * k).exp()
}

pub(crate) fn ln_power_mean(x: DD, y: DD, k: f64) -> Result<DD> {
    if x == y {
        return Ok(x.ln());
    }
    if k == 0.0 {
        return Ok((x.ln() + y.ln()) * 0.5);
    }
    let s = finite(pow(x, k) + pow(y, k), "a^k + b^k")?;
    finite((s * 0.5).ln() / k, "power mean")
}

pub(crate) fn ln_heronian(x: DD, y: DD) -> Result<DD> {
    finite(((x + y + (x * y).sqrt()) / 3.0).ln(), "Heronian mean")
}

/// `ln I = (y ln y - x ln x)/(y - x) - 1`. Close to the diagonal the quotient
/// loses most of its digits, so with `z = (y - x)/(y + x)` the equivalent
/// series `ln I = ln A - sum_{m>=1} z^{2m} / (2m (2m + 1))` is used instead.
pub(crate) fn ln_identric(x: DD, y: DD) -> Result<DD> {
    if x == y {
        return Ok(x.ln());
    }
    let z = (y - x) / (y + x);
    if z.abs().hi() < 0.1 {
        let z2 = z.sqr();
        let mut power = z2;
        let mut series = DD::ZERO;
        for m in 1..=40 {
            let two_m = 2.0 * m as f64;
            let term = power / (two_m * (two_m + 1.0));
            series = series + term;
            if term.hi().abs() <= 1e-36 * series.hi().abs() {
                break;
            }
            power = power * z2;
        }
        finite(((x + y) * 0.5).ln() - series, "identric mean")
    } else {
        let num = y * y.ln() - x * x.ln();
        finite(num / (y - x) - DD::ONE, "identric mean")
    }
}

pub(crate) fn ln_s_mean(x: DD, y: DD) -> Result<DD> {
    finite((x * x.ln() + y * y.ln()) / (x + y), "S-mean")
}

pub(crate) fn ln_unnormalized_power(x: DD, y: DD, k: f64) -> Result<DD> {
    if k == 0.0 {
        return Err(MeanError::Domain(
            "unnormalized power requires a nonzero order".into(),
        ));
    }
    let s = finite(pow(x, k) + pow(y, k), "a^k + b^k")?;
    finite(s.ln() / k, "unnormalized power")
}

/// Logarithm of `kind` at the extended-precision pair `(x, y)`.
pub fn extended_ln_eval_dd(kind: MeanKind, x: DD, y: DD) -> Result<DD> {
    if !(x.is_sign_positive_nonzero() && y.is_sign_positive_nonzero()) {
        return Err(MeanError::Domain("arguments must be positive".into()));
    }
    // every kind is homogeneous of degree one, so both arguments are divided
    // by the power of two nearest the one whose k-th power dominates
    let negative_order = matches!(
        kind,
        MeanKind::PowerMean(k) | MeanKind::UnnormalizedPower(k) if k.value() < 0.0
    );
    let reference = if (x < y) == negative_order { x } else { y };
    let e = reference.hi().log2().round() as i32;
    let (x, y) = (x.scale_pow2(-e), y.scale_pow2(-e));
    let ln = match kind {
        MeanKind::PowerMean(k) => ln_power_mean(x, y, k.value()),
        MeanKind::Heronian => ln_heronian(x, y),
        MeanKind::Identric => ln_identric(x, y),
        MeanKind::SMean => ln_s_mean(x, y),
        MeanKind::UnnormalizedPower(k) => ln_unnormalized_power(x, y, k.value()),
    }?;
    Ok(ln + DD::LN_2 * e as f64)
}

/// Logarithm of `kind` at `p`, in extended precision.
pub fn extended_ln_eval(kind: MeanKind, p: PositivePair) -> Result<DD> {
    extended_ln_eval_dd(kind, DD::from(p.a()), DD::from(p.b()))
}

/// Evaluates `kind` at `p` with about 32 significant digits.
pub fn extended_eval(kind: MeanKind, p: PositivePair) -> Result<DD> {
    kind.validate()?;
    let ln = extended_ln_eval(kind, p)?;
    let v = ln.exp();
    if v.is_finite() && v.hi() > 0.0 {
        Ok(v)
    } else {
        Err(MeanError::Range(format!(
            "{} at ({}, {}) is outside the double range",
            kind.label(),
            p.a(),
            p.b()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::means::Order;

    fn pair(a: f64, b: f64) -> PositivePair {
        PositivePair::new(a, b).unwrap()
    }

    /// Relative error against a 50-digit reference split as `hi + lo`.
    fn rel(v: DD, hi: f64, lo: f64) -> f64 {
        let r = DD::add_f64s(hi, lo);
        ((v - r) / r).abs().to_f64()
    }

    #[test]
    fn arithmetic_mean_is_exact_in_double() {
        let v = extended_eval(MeanKind::ARITHMETIC, pair(1.0, 2.0)).unwrap();
        assert_eq!(v.to_f64(), 1.5);
        assert!((v - DD::from(1.5)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn identric_matches_closed_form_to_25_digits() {
        // exp(2 ln 2 - 1)
        let v = extended_eval(MeanKind::Identric, pair(1.0, 2.0)).unwrap();
        let closed = (DD::LN_2 * 2.0 - DD::ONE).exp();
        assert!(((v - closed) / closed).abs().to_f64() < 1e-25);
        assert!(rel(v, 1.471_517_764_685_769_3, -4.971_501_469_115_345e-17) < 1e-29);
    }

    #[test]
    fn half_order_matches_closed_form_to_25_digits() {
        let v = extended_eval(MeanKind::PowerMean(Order::HALF), pair(1.0, 2.0)).unwrap();
        let closed = ((DD::ONE + DD::from(2.0).sqrt()) * 0.5).sqr();
        assert!(((v - closed) / closed).abs().to_f64() < 1e-25);
    }

    #[test]
    fn near_zero_order_and_near_diagonal_identric() {
        let v = extended_eval(
            MeanKind::PowerMean(Order::new(1e-9).unwrap()),
            pair(1.0, 2.0),
        )
        .unwrap();
        // 1.4142135624580279448500078475867567
        assert!(rel(v, 1.414_213_562_458_027_9, 7.185_774_674_370_135e-17) < 1e-22);
        let b = 1.0 + 1e-13;
        let v = extended_eval(MeanKind::Identric, pair(1.0, b)).unwrap();
        // ln I = ln A - z^2/6 - ..., I ~ A (1 - z^2/6)
        let a = (DD::ONE + DD::from(b)) * 0.5;
        let z = (DD::from(b) - DD::ONE) / (DD::from(b) + DD::ONE);
        let approx = a * (DD::ONE - z.sqr() / 6.0);
        assert!(((v - approx) / approx).abs().to_f64() < 1e-30);
    }

    #[test]
    fn zero_order_unnormalized_is_a_domain_error() {
        assert!(matches!(
            extended_eval(MeanKind::UnnormalizedPower(Order::ZERO), pair(1.0, 2.0)),
            Err(MeanError::Domain(_))
        ));
        assert!(matches!(
            extended_eval(
                MeanKind::UnnormalizedPower(Order::new(1e-6).unwrap()),
                pair(1.0, 2.0)
            ),
            Err(MeanError::Range(_))
        ));
    }
}
