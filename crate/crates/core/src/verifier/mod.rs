//! Counterexample search and scans over the catalog.
//!
//! Everything here is deterministic given its inputs: random points come
//! from a seeded ChaCha stream generated up front, evaluation may run on a
//! thread pool, and results are reduced in generation order.

mod falsify;
mod oracle;
mod scans;

use serde::{Deserialize, Serialize};

use crate::catalog::{Bound, InequalitySpec, Param, Point};
use crate::error::VerifyError;

pub use falsify::{falsify, FalsificationReport, Violation};
pub use oracle::{oracle_compare, OracleReport};
pub use scans::{
    derivative_consistency, monotonicity_scan, tightness_scan, DerivativeComparison,
    DerivativeReport, MonotonicityReport, MonotonicityTarget, StepStatus, TightnessPath,
    TightnessSeries,
};

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, VerifyError> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(VerifyError::Config(format!(
                "invalid interval [{lo}, {hi}]"
            )))
        }
    }

    fn positive(self, what: &str) -> Result<Self, VerifyError> {
        if self.lo > 0.0 {
            Ok(self)
        } else {
            Err(VerifyError::Config(format!(
                "{what} range must be positive, got [{}, {}]",
                self.lo, self.hi
            )))
        }
    }

    fn lerp(self, u: f64) -> f64 {
        match u {
            _ if u <= 0.0 => self.lo,
            _ if u >= 1.0 => self.hi,
            _ => (self.lo + u * (self.hi - self.lo)).clamp(self.lo, self.hi),
        }
    }

    fn log_lerp(self, u: f64) -> f64 {
        match u {
            _ if u <= 0.0 => self.lo,
            _ if u >= 1.0 => self.hi,
            _ => {
                let (l, h) = (self.lo.ln(), self.hi.ln());
                (l + u * (h - l)).exp().clamp(self.lo, self.hi)
            }
        }
    }
}

/// Sampling region: `a`, `b` log-uniform, parameters uniform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchBox {
    pub a_range: Interval,
    pub b_range: Interval,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_range: Option<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_range: Option<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2_range: Option<Interval>,
}

/// Parameters are clipped to `|p| <= PARAM_LIMIT` ...
pub const PARAM_LIMIT: f64 = 8.0;
/// ... and open endpoints are moved inwards by this much.
pub const OPEN_BOUNDARY_OFFSET: f64 = 1e-6;

impl SearchBox {
    /// A box over `(a, b)` only.
    pub fn new(a_range: Interval, b_range: Interval) -> Result<Self, VerifyError> {
        Ok(Self {
            a_range: a_range.positive("a")?,
            b_range: b_range.positive("b")?,
            k_range: None,
            beta_range: None,
            k2_range: None,
        })
    }

    pub fn range(&self, param: Param) -> Option<Interval> {
        match param {
            Param::K => self.k_range,
            Param::Beta => self.beta_range,
            Param::K2 => self.k2_range,
        }
    }

    pub fn set_range(&mut self, param: Param, r: Option<Interval>) {
        match param {
            Param::K => self.k_range = r,
            Param::Beta => self.beta_range = r,
            Param::K2 => self.k2_range = r,
        }
    }

    /// The spec's free parameters over their whole domain, clipped to
    /// `[-PARAM_LIMIT, PARAM_LIMIT]` and with open ends moved inwards by
    /// `OPEN_BOUNDARY_OFFSET`.
    pub fn for_spec(
        spec: &InequalitySpec,
        a_range: Interval,
        b_range: Interval,
    ) -> Result<Self, VerifyError> {
        let mut bx = Self::new(a_range, b_range)?;
        for &param in &spec.free_params {
            let (lo, hi) = spec.domain.bounds(param);
            let clip = |b: Bound, inward: f64| {
                let v = b.value.clamp(-PARAM_LIMIT, PARAM_LIMIT);
                if b.inclusive || v != b.value {
                    v
                } else {
                    v + inward
                }
            };
            let r = Interval::new(
                clip(lo, OPEN_BOUNDARY_OFFSET),
                clip(hi, -OPEN_BOUNDARY_OFFSET),
            )
            .map_err(|_| {
                VerifyError::Config(format!(
                    "{}: empty sampling range for {}",
                    spec.id,
                    param.name()
                ))
            })?;
            bx.set_range(param, Some(r));
        }
        Ok(bx)
    }

    /// Free axes in sampling order: `a`, `b`, then the parameters present.
    pub(crate) fn axes(&self) -> Vec<Axis> {
        let mut axes = vec![Axis::A, Axis::B];
        axes.extend(
            Param::ALL
                .into_iter()
                .filter(|p| self.range(*p).is_some())
                .map(Axis::Param),
        );
        axes
    }

    /// Maps unit-cube coordinates (one per axis) to a point.
    pub(crate) fn point_at(&self, axes: &[Axis], u: &[f64]) -> Point {
        let mut p = Point::new(self.a_range.lo, self.b_range.lo);
        for (axis, &t) in axes.iter().zip(u) {
            match *axis {
                Axis::A => p.a = self.a_range.log_lerp(t),
                Axis::B => p.b = self.b_range.log_lerp(t),
                Axis::Param(param) => {
                    if let Some(r) = self.range(param) {
                        p.params.set(param, r.lerp(t));
                    }
                }
            }
        }
        p
    }

    fn check_against(&self, spec: &InequalitySpec) -> Result<(), VerifyError> {
        for &param in &spec.free_params {
            if self.range(param).is_none() {
                return Err(VerifyError::Config(format!(
                    "{}: no sampling range for {}",
                    spec.id,
                    param.name()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Axis {
    A,
    B,
    Param(Param),
}

/// Search effort and acceptance threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifierConfig {
    pub seed: u64,
    pub n_random: usize,
    pub grid_per_axis: usize,
    pub refine_steps: usize,
    pub tolerance: f64,
    /// Worker threads; `0` uses all cores. Never affects results.
    #[serde(default)]
    pub threads: usize,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_random: 10_000,
            grid_per_axis: 6,
            refine_steps: 30,
            tolerance: crate::DEFAULT_TOLERANCE,
            threads: 1,
        }
    }
}

impl VerifierConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.grid_per_axis < 2 {
            return Err(VerifyError::Config("gridPerAxis must be at least 2".into()));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(VerifyError::Config(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    /// Runs `f` on a pool of the configured size.
    pub(crate) fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R, VerifyError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| VerifyError::Config(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;

    fn unit() -> Interval {
        Interval::new(1e-3, 1e3).unwrap()
    }

    #[test]
    fn spec_boxes_are_clipped() {
        let bx = SearchBox::for_spec(lookup("INEQ_1_3").unwrap(), unit(), unit()).unwrap();
        assert_eq!(bx.k_range, Some(Interval { lo: 1e-6, hi: 8.0 }));
        assert_eq!(
            bx.beta_range,
            Some(Interval {
                lo: 2.0 / 3.0,
                hi: 8.0
            })
        );
        let bx = SearchBox::for_spec(lookup("INEQ_1_2").unwrap(), unit(), unit()).unwrap();
        assert_eq!(bx.k_range, Some(Interval { lo: 1e-6, hi: 0.5 }));
        let bx = SearchBox::for_spec(lookup("MONO_F1").unwrap(), unit(), unit()).unwrap();
        assert_eq!(bx.k_range, Some(Interval { lo: -8.0, hi: 8.0 }));
        assert_eq!(bx.axes().len(), 4);
    }

    #[test]
    fn invalid_boxes() {
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(SearchBox::new(Interval::new(-1.0, 1.0).unwrap(), unit()).is_err());
    }

    #[test]
    fn point_mapping_hits_corners() {
        let bx = SearchBox::for_spec(lookup("INEQ_1_2").unwrap(), unit(), unit()).unwrap();
        let axes = bx.axes();
        let p = bx.point_at(&axes, &[0.0, 1.0, 1.0]);
        assert_eq!((p.a, p.b, p.params.k), (1e-3, 1e3, Some(0.5)));
    }
}
