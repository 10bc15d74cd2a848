use super::{Order, PositivePair, PowerTransformedPair};
use crate::error::{MeanError, Result};
use crate::extended::DoubleDouble;

use std::f64::consts::LN_2;

/// `ln(num / den)` that survives overflow or underflow of the quotient.
#[inline]
pub(crate) fn ln_ratio(num: f64, den: f64) -> f64 {
    let r = num / den;
    if r.is_normal() {
        r.ln()
    } else {
        num.ln() - den.ln()
    }
}

/// `r ln r` for `0 <= r <= 1`; the `r -> 0` limit is 0.
#[inline]
fn x_ln_x(r: f64, ln_r: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        r * ln_r
    }
}

#[inline]
fn clamp_between(v: f64, lo: f64, hi: f64) -> f64 {
    v.max(lo).min(hi)
}

pub(crate) fn geometric(lo: f64, hi: f64) -> f64 {
    let prod = lo * hi;
    let g = if prod.is_normal() {
        prod.sqrt()
    } else {
        lo.sqrt() * hi.sqrt()
    };
    clamp_between(g, lo, hi)
}

/// The largest of `a^k, b^k` is factored out so that the remaining ratio
/// raised to `k` is at most one. Returns `(factor, ln ratio)` with
/// `k * ln ratio <= 0`.
#[inline]
fn factor_out(lo: f64, hi: f64, k: f64) -> (f64, f64) {
    if k > 0.0 {
        (hi, ln_ratio(lo, hi))
    } else {
        (lo, ln_ratio(hi, lo))
    }
}

/// `ln cosh s`, without cancellation for small `s` or overflow for large.
#[inline]
fn ln_cosh(s: f64) -> f64 {
    let s = s.abs();
    if s < 0.5 {
        let h = (0.5 * s).sinh();
        (2.0 * h * h).ln_1p()
    } else {
        s - LN_2 + (-2.0 * s).exp().ln_1p()
    }
}

/// Power mean of order `k`; `k = 0` gives the geometric mean.
///
/// For `k != 0, 1` the mean is written as `R * exp(w)` for two choices of
/// the reference `R`, and the one with the smaller `|w|` is used, since the
/// rounding error of `w` is amplified by `exp`:
///
/// * `R = M`, the argument whose `k`-th power dominates, with
///   `w = log1p(expm1(k ln ρ) / 2) / k` and `ρ = other / M`;
/// * `R = sqrt(ab)`, with `w = ln cosh(k ln ρ / 2) / k`, which stays small
///   as `k -> 0`.
///
/// No power of the inputs is ever formed, so nothing overflows.
pub fn power_mean(p: PositivePair, k: Order) -> f64 {
    let (lo, hi) = p.canonical();
    if lo == hi {
        return lo;
    }
    let k = k.value();
    if k == 0.0 {
        return geometric(lo, hi);
    }
    if k == 1.0 {
        return clamp_between(0.5 * lo + 0.5 * hi, lo, hi);
    }
    let (m, ln_rho) = factor_out(lo, hi, k);
    let u = k * ln_rho;
    let from_extreme = (0.5 * u.exp_m1()).ln_1p() / k;
    let from_geometric = ln_cosh(0.5 * u) / k;
    let use_geometric = from_geometric.abs() < from_extreme.abs();
    let (reference, w) = if use_geometric {
        (geometric(lo, hi), from_geometric)
    } else {
        (m, from_extreme)
    };
    let value = if w.abs() <= EXACT_EXPONENT {
        reference * w.exp()
    } else {
        let w = refined_exponent(lo, hi, k, use_geometric);
        reference * w.hi().exp() * (1.0 + w.lo())
    };
    clamp_between(value, lo, hi)
}

/// Above this `|w|` the double-precision exponent loses more than an ulp
/// of the result and is recomputed in double-double.
const EXACT_EXPONENT: f64 = 0.5;

/// The exponent `w` of [`power_mean`] in double-double arithmetic.
fn refined_exponent(lo: f64, hi: f64, k: f64, geometric: bool) -> DoubleDouble {
    let one = DoubleDouble::ONE;
    let ln_lo = DoubleDouble::from(lo).ln();
    let ln_hi = DoubleDouble::from(hi).ln();
    let ln_rho = if k > 0.0 {
        ln_lo - ln_hi
    } else {
        ln_hi - ln_lo
    };
    let u = ln_rho * k;
    if geometric {
        // cosh(u/2) - 1 = 2 sinh^2(u/4)
        let q = u * 0.25;
        let sinh = (q.exp_m1() - (-q).exp_m1()) * 0.5;
        (one + sinh.sqr() * 2.0).ln() / k
    } else {
        (one + u.exp_m1() * 0.5).ln() / k
    }
}

/// `(a + b + sqrt(ab)) / 3`.
pub fn heronian(p: PositivePair) -> f64 {
    const BIG: f64 = 1e300;
    // 2^64, applied to both arguments only when their sum could overflow
    const SHIFT: f64 = 18446744073709551616.0;
    let (lo, hi) = p.canonical();
    if lo == hi {
        return lo;
    }
    let he = if hi > BIG {
        let (l, h) = (lo / SHIFT, hi / SHIFT);
        (l + h + geometric(l, h)) / 3.0 * SHIFT
    } else {
        (lo + hi + geometric(lo, hi)) / 3.0
    };
    clamp_between(he, lo, hi)
}

/// Identric mean `exp((b ln b - a ln a)/(b - a) - 1)`.
///
/// By homogeneity `I(a, b) = max * I(ρ, 1)` with `ρ = min/max`, and
/// `ln I(ρ, 1) = ρ ln ρ / (ρ - 1) - 1`. For `ρ >= 1/2` the difference
/// `ρ - 1` is exact and `ln ρ` is taken as `log1p(ρ - 1)`.
pub fn identric(p: PositivePair) -> f64 {
    let (lo, hi) = p.canonical();
    if lo == hi {
        return lo;
    }
    let rho = lo / hi;
    let w = if rho >= 0.5 {
        let t = rho - 1.0;
        rho * t.ln_1p() / t
    } else {
        x_ln_x(rho, ln_ratio(lo, hi)) / (rho - 1.0)
    };
    clamp_between(hi * (w - 1.0).exp(), lo, hi)
}

/// S-mean `a^{a/(a+b)} b^{b/(a+b)} = max * exp(ρ ln ρ / (1 + ρ))`.
pub fn s_mean(p: PositivePair) -> f64 {
    let (lo, hi) = p.canonical();
    if lo == hi {
        return lo;
    }
    let rho = lo / hi;
    let w = x_ln_x(rho, ln_ratio(lo, hi)) / (1.0 + rho);
    clamp_between(hi * w.exp(), lo, hi)
}

/// `ln((a^k + b^k)^{1/k}) = ln 2 / k + ln A_k`.
pub fn ln_unnormalized_power(p: PositivePair, k: Order) -> Result<f64> {
    let kv = k.nonzero("unnormalized power")?;
    Ok(LN_2 / kv + power_mean(p, k).ln())
}

/// `x * 2^n`, exact unless the result leaves the normal range.
fn mul_pow2(x: f64, n: i64) -> f64 {
    let mut v = x;
    let mut n = n.clamp(-2200, 2200) as i32;
    while n != 0 {
        let step = n.clamp(-1000, 1000);
        v *= f64::from_bits(((1023 + step) as u64) << 52);
        n -= step;
    }
    v
}

/// `(a^k + b^k)^{1/k}` for `k != 0`, evaluated as `2^{1/k} A_k`.
///
/// The factor `2^{1/k}` depends on `k` alone; its integer part of the
/// exponent is applied exactly, so the result is finite whenever the true
/// value is representable.
pub fn unnormalized_power(p: PositivePair, k: Order) -> Result<f64> {
    let kv = k.nonzero("unnormalized power")?;
    let (lo, hi) = p.canonical();
    let value = if kv == 1.0 {
        lo + hi
    } else {
        let inv = 1.0 / kv;
        // 1/k - inv, so that the rounding of 1/k is not amplified by 2^{1/k}
        let inv_err = (-inv).mul_add(kv, 1.0) / kv;
        let whole = inv.floor();
        let frac = (inv - whole).exp2() * (LN_2 * inv_err).exp();
        mul_pow2(power_mean(p, k) * frac, whole as i64)
    };
    if value.is_normal() {
        Ok(value)
    } else {
        Err(MeanError::Range(format!(
            "(a^k + b^k)^(1/k) is not representable for a={}, b={}, k={kv}",
            p.a(),
            p.b()
        )))
    }
}

/// `(x, y) = (a^k, b^k)`, refusing results that overflow, underflow or lose
/// precision as subnormals.
pub fn power_transform(p: PositivePair, k: Order) -> Result<PowerTransformedPair> {
    let k = k.value();
    let x = p.a().powf(k);
    let y = p.b().powf(k);
    if x.is_normal() && y.is_normal() {
        Ok(PowerTransformedPair::new_unchecked(x, y))
    } else {
        Err(MeanError::Range(format!(
            "({}^{k}, {}^{k}) = ({x}, {y}) is outside the normal double range",
            p.a(),
            p.b()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: f64, b: f64) -> PositivePair {
        PositivePair::new(a, b).unwrap()
    }

    fn order(k: f64) -> Order {
        Order::new(k).unwrap()
    }

    fn rel(x: f64, y: f64) -> f64 {
        ((x - y) / y).abs()
    }

    #[test]
    fn power_mean_examples() {
        assert_eq!(power_mean(pair(1.0, 1.0), order(7.0)), 1.0);
        assert_eq!(power_mean(pair(1.0, 4.0), Order::ZERO), 2.0);
        // ((1 + sqrt 2)/2)^2
        let expected = 1.457_106_781_186_547_524_400_844_362_104_849;
        assert!(rel(power_mean(pair(1.0, 2.0), Order::HALF), expected) < 4.0 * f64::EPSILON);
        let big = power_mean(pair(1e300, 2e300), order(8.0));
        assert!(big.is_finite() && (1e300..=2e300).contains(&big));
    }

    #[test]
    fn power_mean_negative_and_extreme_orders() {
        // harmonic mean of 1 and 4 is 8/5
        assert!(rel(power_mean(pair(1.0, 4.0), order(-1.0)), 1.6) < 4.0 * f64::EPSILON);
        let lo_limit = power_mean(pair(1.0, 4.0), order(-700.0));
        assert!((1.0..1.01).contains(&lo_limit));
        let hi_limit = power_mean(pair(1.0, 4.0), order(700.0));
        assert!((3.99..=4.0).contains(&hi_limit));
        // ratio beyond the double range
        let wide = power_mean(pair(1e-300, 1e300), order(3.0));
        assert!(rel(wide, 1e300 * 0.5f64.powf(1.0 / 3.0)) < 1e-15);
    }

    #[test]
    fn heronian_examples() {
        assert_eq!(heronian(pair(1.0, 1.0)), 1.0);
        assert!(rel(heronian(pair(1.0, 4.0)), 7.0 / 3.0) <= f64::EPSILON);
        let expected = 1.471_404_520_791_031_682_933_896_241_403_232_7;
        assert!(rel(heronian(pair(1.0, 2.0)), expected) < 4.0 * f64::EPSILON);
        let huge = heronian(pair(1e308, 1.5e308));
        assert!(huge.is_finite() && huge > 1e308);
    }

    #[test]
    fn identric_examples() {
        assert_eq!(identric(pair(3.0, 3.0)), 3.0);
        let expected = 1.471_517_764_685_769_286_382_095_080_645_843_5;
        assert!(rel(identric(pair(1.0, 2.0)), expected) < 4.0 * f64::EPSILON);
        // lo/hi underflows: I -> max / e
        let v = identric(pair(1e-320, 1e10));
        assert!(rel(v, 1e10 / std::f64::consts::E) < 1e-14);
    }

    #[test]
    fn s_mean_examples() {
        assert_eq!(s_mean(pair(5.0, 5.0)), 5.0);
        assert!(rel(s_mean(pair(1.0, 2.0)), 2f64.powf(2.0 / 3.0)) < 4.0 * f64::EPSILON);
        let expected = 999_986.184_598_691_068_101_189_382_878_875_82;
        assert!(rel(s_mean(pair(1.0, 1e6)), expected) < 1e-14);
    }

    #[test]
    fn unnormalized_power_examples() {
        assert_eq!(unnormalized_power(pair(1.0, 2.0), Order::ONE).unwrap(), 3.0);
        assert!(
            rel(
                unnormalized_power(pair(1.0, 2.0), Order::TWO).unwrap(),
                5f64.sqrt()
            ) < 4.0 * f64::EPSILON
        );
        let expected = 5.828_427_124_746_190_097_603_377_448_419_396_2;
        assert!(
            rel(
                unnormalized_power(pair(1.0, 2.0), Order::HALF).unwrap(),
                expected
            ) < 4.0 * f64::EPSILON
        );
        assert!(matches!(
            unnormalized_power(pair(1.0, 2.0), Order::ZERO),
            Err(MeanError::Domain(_))
        ));
        assert!(matches!(
            unnormalized_power(pair(1.0, 2.0), order(1e-6)),
            Err(MeanError::Range(_))
        ));
        let ln = ln_unnormalized_power(pair(1.0, 2.0), order(1e-6)).unwrap();
        assert!(rel(ln, 1e6 * std::f64::consts::LN_2 + 0.5 * 2f64.ln()) < 1e-12);
    }

    #[test]
    fn power_transform_examples() {
        let t = power_transform(pair(1.0, 2.0), Order::ZERO).unwrap();
        assert_eq!((t.x(), t.y()), (1.0, 1.0));
        let t = power_transform(pair(2.0, 3.0), Order::TWO).unwrap();
        assert_eq!((t.x(), t.y()), (4.0, 9.0));
        let t = power_transform(pair(1.0, 2.0), order(-1.0)).unwrap();
        assert_eq!((t.x(), t.y()), (1.0, 0.5));
        assert!(matches!(
            power_transform(pair(1e300, 2.0), order(2.0)),
            Err(MeanError::Range(_))
        ));
        assert!(matches!(
            power_transform(pair(1e-300, 2.0), order(2.0)),
            Err(MeanError::Range(_))
        ));
    }

    #[test]
    fn symmetric_bitwise() {
        let p = pair(3.7, 0.011);
        let q = p.swapped();
        for k in [-3.0, -0.2, 0.0, 0.4, 1.0, 2.5] {
            assert_eq!(
                power_mean(p, order(k)).to_bits(),
                power_mean(q, order(k)).to_bits()
            );
        }
        assert_eq!(identric(p).to_bits(), identric(q).to_bits());
        assert_eq!(s_mean(p).to_bits(), s_mean(q).to_bits());
        assert_eq!(heronian(p).to_bits(), heronian(q).to_bits());
    }
}
