use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// An unevaluated sum `hi + lo` of two doubles with `|lo| <= ulp(hi)/2`,
/// giving roughly 106 bits (about 32 decimal digits) of significand.
///
/// Only what the oracle needs is provided: the four operations, `sqrt`,
/// `exp`, `exp_m1` and `ln`. The exponent range is that of `f64`; results
/// that overflow come back with an infinite `hi`.
#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let v = s - a;
    let e = (a - (s - v)) + (b - v);
    (s, e)
}

/// Requires `|a| >= |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// `2^m` for `m` in the normal exponent range.
#[inline]
fn pow2(m: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&m));
    f64::from_bits(((1023 + m) as u64) << 52)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    pub const LN_2: Self = Self {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };

    #[inline]
    pub const fn from_f64(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    /// Nearest double.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn is_sign_positive_nonzero(self) -> bool {
        self.hi > 0.0 || (self.hi == 0.0 && self.lo > 0.0)
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Exact product of two doubles.
    pub fn mul_f64s(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Self { hi, lo }
    }

    /// Exact sum of two doubles.
    pub fn add_f64s(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Self { hi, lo }
    }

    pub(crate) fn scale_pow2(self, m: i32) -> Self {
        // split so each factor is a normal power of two
        let mut v = self;
        let mut m = m;
        while m != 0 {
            let step = m.clamp(-1000, 1000);
            let f = pow2(step);
            v = Self {
                hi: v.hi * f,
                lo: v.lo * f,
            };
            m -= step;
        }
        v
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                Self::from_f64(f64::NAN)
            };
        }
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let diff = self - Self::mul_f64s(ax, ax);
        let (hi, lo) = two_sum(ax, diff.hi * (x * 0.5));
        Self::renorm(hi, lo)
    }

    /// `expm1` of an argument with `|r| <= ln(2)/2`, reduced by `2^9` and
    /// rebuilt through `e^{2t} - 1 = 2s + s^2`, which keeps relative precision.
    fn exp_m1_reduced(r: Self) -> Self {
        const HALVINGS: i32 = 9;
        let t = r.scale_pow2(-HALVINGS);
        let mut term = t;
        let mut sum = t;
        for n in 2..=24 {
            term = term * t / (n as f64);
            sum = sum + term;
            if term.hi.abs() <= 1e-36 * sum.hi.abs() {
                break;
            }
        }
        for _ in 0..HALVINGS {
            sum = sum.scale_pow2(1) + sum.sqr();
        }
        sum
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.782_712_893_384 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return Self::ONE;
        }
        let m = (self.hi / Self::LN_2.hi).round();
        let r = self - Self::LN_2 * m;
        let s = Self::exp_m1_reduced(r) + Self::ONE;
        s.scale_pow2(m as i32)
    }

    /// `e^x - 1`, accurate relative to the result for small `x`.
    pub fn exp_m1(self) -> Self {
        if self.hi.abs() <= 0.5 * Self::LN_2.hi {
            Self::exp_m1_reduced(self)
        } else {
            self.exp() - Self::ONE
        }
    }

    /// Natural logarithm by Newton iteration on `exp`. Absolute accuracy is
    /// about `1e-32` near 1; the relative accuracy of a tiny result is not
    /// guaranteed, so callers needing it near 1 should work with offsets.
    ///
    /// Values whose low word would be subnormal (below about `1e-290`) carry
    /// fewer than 106 bits; the oracle never needs them.
    pub fn ln(self) -> Self {
        if !(self.hi > 0.0) {
            return Self::from_f64(if self.hi == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            });
        }
        if self.hi == f64::INFINITY {
            return self;
        }
        if self.hi == 1.0 && self.lo == 0.0 {
            return Self::ZERO;
        }
        // bring the argument into [1, 2) so exp(-x) stays far from subnormals
        let e = self.hi.log2().floor() as i32;
        let m = self.scale_pow2(-e);
        let mut x = Self::from_f64(m.hi.ln());
        for _ in 0..2 {
            x = x + m * (-x).exp() - Self::ONE;
        }
        x + Self::LN_2 * (e as f64)
    }

    /// `self^k` for positive `self`.
    pub fn powf(self, k: Self) -> Self {
        (k * self.ln()).exp()
    }
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        Self::from_f64(v)
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DD({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        if !s1.is_finite() {
            return Self::from_f64(s1);
        }
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        Self::renorm(s1, s2)
    }
}

impl Add<f64> for DoubleDouble {
    type Output = Self;

    fn add(self, rhs: f64) -> Self {
        self + Self::from_f64(rhs)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Sub<f64> for DoubleDouble {
    type Output = Self;

    fn sub(self, rhs: f64) -> Self {
        self + Self::from_f64(-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        if !p1.is_finite() {
            return Self::from_f64(p1);
        }
        let p2 = p2 + (self.hi * rhs.lo + self.lo * rhs.hi);
        Self::renorm(p1, p2)
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;

    fn mul(self, rhs: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, rhs);
        if !p1.is_finite() {
            return Self::from_f64(p1);
        }
        let p2 = p2 + self.lo * rhs;
        Self::renorm(p1, p2)
    }
}

impl Div for DoubleDouble {
    type Output = Self;

    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        if !q1.is_finite() {
            return Self::from_f64(q1);
        }
        let r = self - rhs * q1;
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * q2;
        let q3 = r.hi / rhs.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self::renorm(q1, q2) + q3
    }
}

impl Div<f64> for DoubleDouble {
    type Output = Self;

    fn div(self, rhs: f64) -> Self {
        self / Self::from_f64(rhs)
    }
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;

    type DD = DoubleDouble;

    /// Relative difference against a reference given as two doubles.
    fn rel(x: DD, hi: f64, lo: f64) -> f64 {
        let r = DD::add_f64s(hi, lo);
        ((x - r) / r).abs().to_f64()
    }

    // Reference digits below come from 50-digit arbitrary precision
    // evaluations, split into (nearest double, remainder).

    #[test]
    fn arithmetic_is_exact_to_about_32_digits() {
        let third = DD::ONE / DD::from(3.0);
        let back = third * 3.0;
        assert!((back - DD::ONE).abs().to_f64() < 1e-32);
        let two = DD::from(2.0);
        let s = two.sqrt();
        assert!(rel(s, 1.414_213_562_373_095_1, -9.667_293_313_452_913e-17) < 1e-31);
        assert!(((s * s) - two).abs().to_f64() < 1e-31);
    }

    #[test]
    fn exp_and_ln_round_trip_known_constants() {
        let e = DD::ONE.exp();
        assert!(rel(e, 2.718_281_828_459_045, 1.445_646_891_729_250_2e-16) < 1e-31);
        let ln2 = DD::from(2.0).ln();
        assert!(rel(ln2, DD::LN_2.hi, DD::LN_2.lo) < 1e-31);
        for x in [1e-250, 1e-5, 0.3, 1.0 + 1e-12, 7.5, 1e10, 1e300] {
            let d = DD::from(x);
            let back = d.ln().exp();
            assert!(((back - d) / d).abs().to_f64() < 1e-29, "{x}");
        }
    }

    #[test]
    fn exp_m1_keeps_relative_precision() {
        let x = DD::from(1e-20);
        let v = DD::exp_m1(x);
        // e^x - 1 = x + x^2/2 + ...
        let expect = DD::from(1e-20) + DD::from(5e-41);
        assert!(((v - expect) / expect).abs().to_f64() < 1e-30);
        let y = DD::from(-0.3);
        let direct = y.exp() - DD::ONE;
        assert!(((DD::exp_m1(y) - direct) / direct).abs().to_f64() < 1e-30);
    }

    #[test]
    fn overflow_and_underflow() {
        assert!(!DD::from(710.0).exp().is_finite());
        assert_eq!(DD::from(-800.0).exp().to_f64(), 0.0);
        assert_eq!(DD::ZERO.ln().to_f64(), f64::NEG_INFINITY);
        assert!(DD::from(-1.0).ln().to_f64().is_nan());
    }

    #[test]
    fn ordering() {
        let a = DD::add_f64s(1.0, 1e-20);
        assert!(a > DD::ONE);
        assert!(DD::ONE < a);
        assert!(-a < DD::ZERO);
    }
}
