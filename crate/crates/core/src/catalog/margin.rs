//! Signed, normalized gaps between adjacent chain members.

use serde::{Deserialize, Serialize};

use super::{InequalitySpec, Point, MAX_CHAIN};
use crate::error::Result;
use crate::extended::DoubleDouble;
use crate::DEFAULT_TOLERANCE;

/// Outcome of evaluating an inequality at one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Verdict {
    Holds,
    Violated,
    /// The margin lies inside the rounding-noise band.
    Inconclusive,
    /// `a = b`: strict inequalities cannot hold.
    Degenerate,
    /// The point is outside the domain, or a member could not be evaluated.
    OutOfDomain(String),
}

/// Gaps `(c_{i+1} - c_i) / c_{i+1}` of a chain at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MarginReport {
    pub spec_id: String,
    pub point: Point,
    /// Chain values; infinite when a member exceeds the double range (the
    /// gaps are then computed from logarithms).
    pub values: Vec<f64>,
    pub gaps: Vec<f64>,
    /// `NaN` (serialized as `null`) when out of domain.
    pub min_gap: f64,
    pub verdict: Verdict,
}

struct Chain {
    len: usize,
    values: [f64; MAX_CHAIN],
    gaps: [f64; MAX_CHAIN],
}

impl Chain {
    fn min_gap(&self) -> f64 {
        self.gaps[..self.len - 1]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates the chain directly when every member is a normal double, and
/// through logarithms otherwise.
fn evaluate(spec: &InequalitySpec, point: &Point) -> Result<Chain> {
    let n = spec.chain.len();
    let mut chain = Chain {
        len: n,
        values: [0.0; MAX_CHAIN],
        gaps: [0.0; MAX_CHAIN],
    };
    let mut direct = true;
    for (i, e) in spec.chain.iter().enumerate() {
        match e.eval(point) {
            Ok(v) => chain.values[i] = v,
            Err(_) => {
                direct = false;
                break;
            }
        }
    }
    if direct {
        for i in 0..n - 1 {
            let (lo, hi) = (chain.values[i], chain.values[i + 1]);
            chain.gaps[i] = if lo == hi { 0.0 } else { (hi - lo) / hi };
        }
    } else {
        let mut logs = [0.0; MAX_CHAIN];
        for (i, e) in spec.chain.iter().enumerate() {
            logs[i] = e.ln_eval(point)?;
            chain.values[i] = logs[i].exp();
        }
        for i in 0..n - 1 {
            chain.gaps[i] = -(logs[i] - logs[i + 1]).exp_m1();
        }
    }
    Ok(chain)
}

/// Smallest gap at an in-domain point, or the reason it cannot be evaluated.
///
/// This is the allocation-free core used by the verifier; it does not
/// check the domain.
pub fn min_gap(spec: &InequalitySpec, point: &Point) -> Result<f64> {
    evaluate(spec, point).map(|c| c.min_gap())
}

/// Gaps of the chain in double-double arithmetic, through the extended
/// evaluators. Does not check the domain.
pub fn extended_gaps(spec: &InequalitySpec, point: &Point) -> Result<Vec<DoubleDouble>> {
    let logs = spec
        .chain
        .iter()
        .map(|e| e.ln_eval_extended(point))
        .collect::<Result<Vec<_>>>()?;
    Ok(logs.windows(2).map(|w| -(w[0] - w[1]).exp_m1()).collect())
}

fn out_of_domain(spec: &InequalitySpec, point: &Point, cause: String) -> MarginReport {
    MarginReport {
        spec_id: spec.id.clone(),
        point: *point,
        values: vec![],
        gaps: vec![],
        min_gap: f64::NAN,
        verdict: Verdict::OutOfDomain(cause),
    }
}

/// Gaps smaller than this in magnitude are at or near the double rounding
/// level; [`margin`] recomputes them in double-double.
pub const REFINE_BELOW: f64 = 1e-11;

/// Gaps up to this size are not resolved even in double-double.
pub const EXTENDED_NOISE: f64 = 1e-28;

/// Evaluates every chain member and the relative gaps between neighbours.
///
/// When any gap is below [`REFINE_BELOW`] in magnitude, all gaps are
/// recomputed with the extended evaluators so that the verdict does not
/// depend on rounding noise.
/// The verdict is `Holds` for a minimum gap above [`EXTENDED_NOISE`],
/// `Violated` below `-DEFAULT_TOLERANCE` and `Inconclusive` in between;
/// `a = b` is always `Degenerate`.
pub fn margin(spec: &InequalitySpec, point: &Point) -> MarginReport {
    if let Err(cause) = spec.domain.admit(point) {
        return out_of_domain(spec, point, cause);
    }
    let mut chain = match evaluate(spec, point) {
        Ok(c) => c,
        Err(e) => return out_of_domain(spec, point, e.to_string()),
    };
    let n = chain.len - 1;
    if chain.gaps[..n].iter().any(|g| g.abs() < REFINE_BELOW) {
        if let Ok(x) = extended_gaps(spec, point) {
            for (g, e) in chain.gaps.iter_mut().zip(&x) {
                *g = e.to_f64();
            }
        }
    }
    let min_gap = chain.min_gap();
    let verdict = if point.a == point.b {
        Verdict::Degenerate
    } else if min_gap > EXTENDED_NOISE {
        Verdict::Holds
    } else if min_gap < -DEFAULT_TOLERANCE {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    MarginReport {
        spec_id: spec.id.clone(),
        point: *point,
        values: chain.values[..chain.len].to_vec(),
        gaps: chain.gaps[..chain.len - 1].to_vec(),
        min_gap,
        verdict,
    }
}

/// Three-valued verdict: `Holds` iff the minimum gap exceeds `tolerance`,
/// `Violated` iff it is below `-tolerance`.
pub fn check(spec: &InequalitySpec, point: &Point, tolerance: f64) -> Verdict {
    if let Err(cause) = spec.domain.admit(point) {
        return Verdict::OutOfDomain(cause);
    }
    if point.a == point.b {
        return Verdict::Degenerate;
    }
    match min_gap(spec, point) {
        Err(e) => Verdict::OutOfDomain(e.to_string()),
        Ok(g) if g > tolerance => Verdict::Holds,
        Ok(g) if g < -tolerance => Verdict::Violated,
        Ok(_) => Verdict::Inconclusive,
    }
}
