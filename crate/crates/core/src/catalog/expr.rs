//! Chain members: a scaled, possibly lifted, mean of the point's arguments.

use serde::{Deserialize, Serialize};

use super::{Param, Point};
use crate::error::{MeanError, Result};
use crate::extended::{extended_ln_eval_dd, DoubleDouble};
use crate::means::{ln_eval_mean, power_transform, MeanKind, Order, PositivePair};

type DD = DoubleDouble;

/// An order that is either fixed or read from the point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum OrderRule {
    Fixed(f64),
    Free(Param),
}

impl OrderRule {
    fn resolve(self, point: &Point) -> Result<f64> {
        match self {
            OrderRule::Fixed(k) => Ok(k),
            OrderRule::Free(param) => point.require(param),
        }
    }
}

/// Multiplicative constant `factor * 2^{log2 + coef / param}`.
///
/// Covers `sqrt 2`, `3 / (2 sqrt 2)`, `2^{1/k}` and `3 * 2^{-1/β}` while
/// keeping the power of two symbolic, so the extended path sees it exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScaleRule {
    pub factor: f64,
    pub log2: f64,
    pub log2_over: Option<(Param, f64)>,
}

impl ScaleRule {
    pub const ONE: ScaleRule = ScaleRule::constant(1.0, 0.0);

    pub const fn constant(factor: f64, log2: f64) -> Self {
        Self {
            factor,
            log2,
            log2_over: None,
        }
    }

    /// `factor * 2^{coef / param}`.
    pub const fn two_pow_over(factor: f64, param: Param, coef: f64) -> Self {
        Self {
            factor,
            log2: 0.0,
            log2_over: Some((param, coef)),
        }
    }

    fn exponent(&self, point: &Point) -> Result<f64> {
        match self.log2_over {
            None => Ok(self.log2),
            Some((param, coef)) => {
                let v = point.require(param)?;
                if v == 0.0 {
                    return Err(MeanError::Domain(format!(
                        "{} must be nonzero",
                        param.name()
                    )));
                }
                Ok(self.log2 + coef / v)
            }
        }
    }

    fn ln(&self, point: &Point) -> Result<f64> {
        Ok(self.factor.ln() + self.exponent(point)? * std::f64::consts::LN_2)
    }

    fn ln_dd(&self, point: &Point) -> Result<DD> {
        let mut e = DD::from(self.log2);
        if let Some((param, coef)) = self.log2_over {
            e = e + DD::from(coef) / point.require(param)?;
        }
        Ok(DD::from(self.factor).ln() + DD::LN_2 * e)
    }

    fn is_one(&self) -> bool {
        self.factor == 1.0 && self.log2 == 0.0 && self.log2_over.is_none()
    }
}

/// What is applied to `(a, b)` before the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ArgTransform {
    Identity,
    /// `(a, b) -> (a^k, b^k)`.
    PowerLift(Param),
}

/// The mean applied to the (transformed) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ExprKind {
    PowerMean(OrderRule),
    Heronian,
    Identric,
    SMean,
    UnnormalizedPower(OrderRule),
    /// `wa * A + wg * G`.
    Blend {
        arithmetic: f64,
        geometric: f64,
    },
}

/// One member of an inequality chain:
/// `scale * a^{outer} * kind(transform(a, b))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MeanExpr {
    pub scale: ScaleRule,
    pub kind: ExprKind,
    pub arg_transform: ArgTransform,
    /// `a^{1 - param}`; `a` is the first argument, not the smaller one.
    pub outer_one_minus: Option<Param>,
}

enum Resolved {
    Kind(MeanKind),
    Blend(f64, f64),
}

impl MeanExpr {
    pub const fn mean(kind: ExprKind) -> Self {
        Self {
            scale: ScaleRule::ONE,
            kind,
            arg_transform: ArgTransform::Identity,
            outer_one_minus: None,
        }
    }

    pub const fn scaled(self, scale: ScaleRule) -> Self {
        Self { scale, ..self }
    }

    pub const fn lifted(self, param: Param) -> Self {
        Self {
            arg_transform: ArgTransform::PowerLift(param),
            ..self
        }
    }

    pub const fn times_a_pow_one_minus(self, param: Param) -> Self {
        Self {
            outer_one_minus: Some(param),
            ..self
        }
    }

    fn resolve(&self, point: &Point) -> Result<Resolved> {
        let order = |rule: OrderRule| rule.resolve(point).and_then(Order::new);
        let kind = match self.kind {
            ExprKind::PowerMean(rule) => MeanKind::PowerMean(order(rule)?),
            ExprKind::Heronian => MeanKind::Heronian,
            ExprKind::Identric => MeanKind::Identric,
            ExprKind::SMean => MeanKind::SMean,
            ExprKind::UnnormalizedPower(rule) => MeanKind::UnnormalizedPower(order(rule)?),
            ExprKind::Blend {
                arithmetic,
                geometric,
            } => return Ok(Resolved::Blend(arithmetic, geometric)),
        };
        kind.validate()?;
        Ok(Resolved::Kind(kind))
    }

    /// Natural logarithm of the member, in double precision.
    pub fn ln_eval(&self, point: &Point) -> Result<f64> {
        let pair = PositivePair::new(point.a, point.b)?;
        let args = match self.arg_transform {
            ArgTransform::Identity => pair,
            ArgTransform::PowerLift(param) => {
                power_transform(pair, Order::new(point.require(param)?)?)?.as_pair()
            }
        };
        let ln_mean = match self.resolve(point)? {
            Resolved::Kind(kind) => ln_eval_mean(kind, args)?,
            Resolved::Blend(wa, wg) => {
                let a = ln_eval_mean(MeanKind::ARITHMETIC, args)?.exp();
                let g = ln_eval_mean(MeanKind::GEOMETRIC, args)?.exp();
                (wa * a + wg * g).ln()
            }
        };
        let mut ln = ln_mean;
        if !self.scale.is_one() {
            ln += self.scale.ln(point)?;
        }
        if let Some(param) = self.outer_one_minus {
            ln += (1.0 - point.require(param)?) * point.a.ln();
        }
        Ok(ln)
    }

    /// The member's value in double precision, if it is a finite normal double.
    pub fn eval(&self, point: &Point) -> Result<f64> {
        let pair = PositivePair::new(point.a, point.b)?;
        let args = match self.arg_transform {
            ArgTransform::Identity => pair,
            ArgTransform::PowerLift(param) => {
                power_transform(pair, Order::new(point.require(param)?)?)?.as_pair()
            }
        };
        let mean = match self.resolve(point)? {
            Resolved::Kind(kind) => crate::means::eval_mean(kind, args)?,
            Resolved::Blend(wa, wg) => {
                let (lo, hi) = args.canonical();
                if lo == hi {
                    lo
                } else {
                    wa * crate::means::power_mean(args, Order::ONE)
                        + wg * crate::means::power_mean(args, Order::ZERO)
                }
            }
        };
        let mut v = mean;
        if !self.scale.is_one() {
            v *= self.scale.factor * self.scale.exponent(point)?.exp2();
        }
        if let Some(param) = self.outer_one_minus {
            v *= point.a.powf(1.0 - point.require(param)?);
        }
        if v.is_normal() {
            Ok(v)
        } else {
            Err(MeanError::Range(format!(
                "member value {v} is not a normal double"
            )))
        }
    }

    /// Natural logarithm of the member in double-double arithmetic, through
    /// the extended evaluators.
    pub fn ln_eval_extended(&self, point: &Point) -> Result<DD> {
        PositivePair::new(point.a, point.b)?;
        let (a, b) = (DD::from(point.a), DD::from(point.b));
        let (x, y) = match self.arg_transform {
            ArgTransform::Identity => (a, b),
            ArgTransform::PowerLift(param) => {
                let k = point.require(param)?;
                ((a.ln() * k).exp(), (b.ln() * k).exp())
            }
        };
        let mut ln = match self.resolve(point)? {
            Resolved::Kind(kind) => extended_ln_eval_dd(kind, x, y)?,
            Resolved::Blend(wa, wg) => {
                let arith = (x + y) * 0.5;
                let geo = (x * y).sqrt();
                (arith * wa + geo * wg).ln()
            }
        };
        if !self.scale.is_one() {
            ln = ln + self.scale.ln_dd(point)?;
        }
        if let Some(param) = self.outer_one_minus {
            ln = ln + a.ln() * (DD::ONE - DD::from(point.require(param)?));
        }
        if ln.is_finite() {
            Ok(ln)
        } else {
            Err(MeanError::Range(
                "member is not representable in extended precision".into(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(a: f64, b: f64) -> Point {
        Point::new(a, b)
    }

    #[test]
    fn blend_is_a_combination_of_a_and_g() {
        let e = MeanExpr::mean(ExprKind::Blend {
            arithmetic: 0.5,
            geometric: 0.5,
        });
        let v = e.eval(&at(1.0, 4.0)).unwrap();
        assert_eq!(v, 2.25);
        assert!((e.ln_eval(&at(1.0, 4.0)).unwrap() - 2.25f64.ln()).abs() < 1e-15);
        let x = e.ln_eval_extended(&at(1.0, 4.0)).unwrap().exp();
        assert!((x - DD::from(2.25)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn scale_two_pow_over_k() {
        let e = MeanExpr::mean(ExprKind::PowerMean(OrderRule::Free(Param::K)))
            .scaled(ScaleRule::two_pow_over(1.0, Param::K, 1.0));
        let p = at(1.0, 2.0).with(Param::K, 1.0);
        assert_eq!(e.eval(&p).unwrap(), 3.0);
        // ln of 2^{1e6} A overflows nothing in the log domain
        let tiny = at(1.0, 2.0).with(Param::K, 1e-6);
        assert!(e.eval(&tiny).is_err());
        let ln = e.ln_eval(&tiny).unwrap();
        assert!((ln / (1e6 * std::f64::consts::LN_2) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lifted_identric_with_outer_factor() {
        // a^{1-k} I(a^k, b^k) at (1, 2, 1/2) is I(1, sqrt 2)
        let e = MeanExpr::mean(ExprKind::Identric)
            .lifted(Param::K)
            .times_a_pow_one_minus(Param::K);
        let p = at(1.0, 2.0).with(Param::K, 0.5);
        let v = e.eval(&p).unwrap();
        assert!((v - 1.201_146_181_640_487_8).abs() < 1e-15);
        let x = e.ln_eval_extended(&p).unwrap().exp();
        assert!(
            (x - DD::add_f64s(1.201_146_181_640_487_8, 6.581_038_201_115_94e-18))
                .abs()
                .to_f64()
                < 1e-29
        );
    }

    #[test]
    fn missing_parameter_is_a_domain_error() {
        let e = MeanExpr::mean(ExprKind::PowerMean(OrderRule::Free(Param::Beta)));
        assert!(matches!(e.eval(&at(1.0, 2.0)), Err(MeanError::Domain(_))));
    }
}
