//! Logarithmic derivatives of `f1(k) = A_k` and `f2(k) = (a^k + b^k)^{1/k}`.
//!
//! With `x = a^k`, `y = b^k`:
//!
//! ```text
//! k^2 f1'/f1 = (x ln x + y ln y)/(x + y) - ln((x + y)/2)
//! k^2 f2'/f2 = (x ln x + y ln y)/(x + y) - ln(x + y)
//! ```
//!
//! Both right-hand sides are scale invariant in `(x, y)`, so they are
//! evaluated from `ρ = min/max` or from `z = (max - min)/(max + min)`.

use super::kernels::ln_ratio;
use super::{Order, PowerTransformedPair};
use crate::error::Result;

use std::f64::consts::LN_2;

/// `(x ln x + y ln y)/(x + y) - ln(x + y)` with `x + y` normalized to `1 + ρ`.
/// Always `< 0`: both terms are nonpositive and the second is strictly negative.
fn convexity_gap_unnormalized(lo: f64, hi: f64) -> f64 {
    let rho = lo / hi;
    let rho_ln_rho = if rho == 0.0 {
        0.0
    } else {
        rho * ln_ratio(lo, hi)
    };
    rho_ln_rho / (1.0 + rho) - rho.ln_1p()
}

/// `(x ln x + y ln y)/(x + y) - ln((x + y)/2)`; nonnegative, zero iff `x = y`.
///
/// Near the diagonal the difference of the two terms cancels to `O(z^2)`,
/// so there it is rewritten as `z atanh z + ln(1 - z^2)/2`, whose two terms
/// only cancel by a factor of two.
fn convexity_gap_normalized(lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return 0.0;
    }
    let (l, h) = if hi > f64::MAX / 2.0 {
        (lo * 0.5, hi * 0.5)
    } else {
        (lo, hi)
    };
    let z = (h - l) / (h + l);
    if z < 0.5 {
        z * z.atanh() + 0.5 * (-z * z).ln_1p()
    } else {
        convexity_gap_unnormalized(lo, hi) + LN_2
    }
}

fn ordered(t: &PowerTransformedPair) -> (f64, f64) {
    if t.x() <= t.y() {
        (t.x(), t.y())
    } else {
        (t.y(), t.x())
    }
}

/// `d/dk ln A_k`, strictly positive for `x != y` and exactly zero for `x = y`.
pub fn log_derivative_f1(t: PowerTransformedPair, k: Order) -> Result<f64> {
    let k = k.nonzero("log_derivative_f1")?;
    let (lo, hi) = ordered(&t);
    Ok(convexity_gap_normalized(lo, hi) / (k * k))
}

/// `d/dk ln (a^k + b^k)^{1/k}`, strictly negative for all positive `x, y`.
pub fn log_derivative_f2(t: PowerTransformedPair, k: Order) -> Result<f64> {
    let k = k.nonzero("log_derivative_f2")?;
    let (lo, hi) = ordered(&t);
    Ok(convexity_gap_unnormalized(lo, hi) / (k * k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::means::{ln_unnormalized_power, power_mean, PositivePair};
    use crate::MeanError;

    fn tp(x: f64, y: f64) -> PowerTransformedPair {
        PowerTransformedPair::from_values(x, y).unwrap()
    }

    fn central_difference(f: impl Fn(f64) -> f64, k: f64, h: f64) -> f64 {
        (f(k + h) - f(k - h)) / (2.0 * h)
    }

    #[test]
    fn equal_arguments() {
        assert_eq!(
            log_derivative_f1(tp(1.0, 1.0), Order::new(3.0).unwrap()).unwrap(),
            0.0
        );
        let d2 = log_derivative_f2(tp(1.0, 1.0), Order::ONE).unwrap();
        assert!((d2 + LN_2).abs() < 1e-16);
    }

    #[test]
    fn reference_values_at_one_two() {
        // (2 ln 2)/3 - ln 1.5 and (2 ln 2)/3 - ln 3, 35 digits
        let d1 = log_derivative_f1(tp(1.0, 2.0), Order::ONE).unwrap();
        assert!((d1 - 0.056_633_012_265_132_490_966_808_298_841_101_909).abs() < 1e-16);
        let d2 = log_derivative_f2(tp(1.0, 2.0), Order::ONE).unwrap();
        assert!((d2 + 0.636_514_168_294_812_818_450_423_822_617_074_66).abs() < 1e-16);
    }

    #[test]
    fn matches_central_differences_at_k_one() {
        let p = PositivePair::new(1.0, 2.0).unwrap();
        let h = 1e-5;
        let fd1 = central_difference(|k| power_mean(p, Order::new(k).unwrap()).ln(), 1.0, h);
        let fd2 = central_difference(
            |k| ln_unnormalized_power(p, Order::new(k).unwrap()).unwrap(),
            1.0,
            h,
        );
        let d1 = log_derivative_f1(tp(1.0, 2.0), Order::ONE).unwrap();
        let d2 = log_derivative_f2(tp(1.0, 2.0), Order::ONE).unwrap();
        assert!((d1 - fd1).abs() < 1e-8, "{d1} vs {fd1}");
        assert!((d2 - fd2).abs() < 1e-8, "{d2} vs {fd2}");
    }

    #[test]
    fn zero_order_is_rejected() {
        assert!(matches!(
            log_derivative_f1(tp(1.0, 2.0), Order::ZERO),
            Err(MeanError::Domain(_))
        ));
        assert!(matches!(
            log_derivative_f2(tp(1.0, 2.0), Order::ZERO),
            Err(MeanError::Domain(_))
        ));
    }

    #[test]
    fn signs_hold_near_the_diagonal_and_at_extreme_ratios() {
        for (x, y) in [
            (1.0, 1.0 + 1e-15),
            (1.0, 1.0 + 1e-9),
            (3.0, 2.999_999),
            (1e-150, 1e150),
            (1e-300, 1.0),
        ] {
            let d1 = log_derivative_f1(tp(x, y), Order::ONE).unwrap();
            let d2 = log_derivative_f2(tp(x, y), Order::ONE).unwrap();
            assert!(d1 > 0.0, "f1' at ({x}, {y}) = {d1}");
            assert!(d2 < 0.0, "f2' at ({x}, {y}) = {d2}");
        }
        // O(z^2) behaviour: z = 5e-10 gives z^2/2 = 1.25e-19
        let d1 = log_derivative_f1(tp(1.0, 1.0 + 1e-9), Order::ONE).unwrap();
        assert!((d1 / 1.25e-19 - 1.0).abs() < 1e-6, "{d1}");
    }
}
