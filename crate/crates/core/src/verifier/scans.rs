//! Monotonicity, derivative and tightness scans.

use serde::{Deserialize, Serialize};

use crate::catalog::{extended_gaps, InequalitySpec, Params, Point};
use crate::error::VerifyError;
use crate::means::{
    ln_eval_mean, log_derivative_f1, log_derivative_f2, power_transform, MeanKind, Order,
    PositivePair,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum MonotonicityTarget {
    /// `A_k`, increasing in `k`.
    F1,
    /// `(a^k + b^k)^{1/k}`, decreasing in `k` on each side of zero.
    F2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum StepStatus {
    /// Moves in the expected direction by more than the tolerance.
    Strict,
    /// Relative change within the tolerance band.
    Inconclusive,
    /// Moves the wrong way by more than the tolerance.
    Violated,
    /// The two orders lie on opposite sides of zero (`F2` only).
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MonotonicityReport {
    pub target: MonotonicityTarget,
    pub a: f64,
    pub b: f64,
    pub k_grid: Vec<f64>,
    /// Function values; may be infinite for `F2` near `k = 0`.
    pub values: Vec<f64>,
    /// Relative change between neighbours, signed so that positive means
    /// the expected direction.
    pub steps: Vec<f64>,
    pub status: Vec<StepStatus>,
    /// `a = b`: `F1` is constant.
    pub degenerate: bool,
    pub holds: bool,
    /// Every compared step is [`StepStatus::Strict`].
    pub strict: bool,
}

/// Checks `F1` increasing or `F2` decreasing between adjacent grid orders.
///
/// Values are compared through logarithms, so `F2` may exceed the double
/// range. For `F2` the grid must not contain zero and steps across zero
/// are skipped.
pub fn monotonicity_scan(
    target: MonotonicityTarget,
    p: PositivePair,
    k_grid: &[f64],
    tolerance: f64,
) -> Result<MonotonicityReport, VerifyError> {
    if k_grid.len() < 2 {
        return Err(VerifyError::Config(
            "k grid needs at least two orders".into(),
        ));
    }
    if k_grid.windows(2).any(|w| !(w[0] < w[1])) || k_grid.iter().any(|k| !k.is_finite()) {
        return Err(VerifyError::Config(
            "k grid must be finite and strictly increasing".into(),
        ));
    }
    if target == MonotonicityTarget::F2 && k_grid.contains(&0.0) {
        return Err(VerifyError::Config("the F2 grid must not contain 0".into()));
    }
    let degenerate = p.is_degenerate() && target == MonotonicityTarget::F1;
    let logs = k_grid
        .iter()
        .map(|&k| {
            let order = Order::new(k)?;
            let kind = match target {
                MonotonicityTarget::F1 => MeanKind::PowerMean(order),
                MonotonicityTarget::F2 => MeanKind::UnnormalizedPower(order),
            };
            ln_eval_mean(kind, p)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (lo, hi) = p.canonical();
    let ln_rho = (lo / hi).ln();
    let mut steps = Vec::with_capacity(k_grid.len() - 1);
    let mut status = Vec::with_capacity(k_grid.len() - 1);
    for i in 0..k_grid.len() - 1 {
        let (lo, hi) = match target {
            MonotonicityTarget::F1 => (logs[i], logs[i + 1]),
            MonotonicityTarget::F2 if k_grid[i] * k_grid[i + 1] > 0.0 => {
                // the common ln max (or ln min) cancels exactly
                (
                    f2_excess(ln_rho, k_grid[i + 1]),
                    f2_excess(ln_rho, k_grid[i]),
                )
            }
            MonotonicityTarget::F2 => (logs[i + 1], logs[i]),
        };
        // (hi - lo) / hi in terms of logarithms
        let step = if lo == hi { 0.0 } else { -(lo - hi).exp_m1() };
        steps.push(step);
        status.push(
            if target == MonotonicityTarget::F2 && k_grid[i] * k_grid[i + 1] < 0.0 {
                StepStatus::Skipped
            } else if step > tolerance {
                StepStatus::Strict
            } else if step < -tolerance {
                StepStatus::Violated
            } else {
                StepStatus::Inconclusive
            },
        );
    }
    let holds = !status.contains(&StepStatus::Violated);
    let strict = status
        .iter()
        .all(|s| matches!(s, StepStatus::Strict | StepStatus::Skipped));
    Ok(MonotonicityReport {
        target,
        a: p.a(),
        b: p.b(),
        k_grid: k_grid.to_vec(),
        values: logs.iter().map(|l| l.exp()).collect(),
        steps,
        status,
        degenerate,
        holds,
        strict,
    })
}

/// `ln f2(k) - ln max(a, b)` for `k > 0`, `ln f2(k) - ln min(a, b)` for
/// `k < 0`; equal to `ln(1 + ρ^|k|)/k` with `ρ = min/max`. Steps of `F2`
/// at large `|k|` are far below the rounding level of `ln f2` itself.
fn f2_excess(ln_rho: f64, k: f64) -> f64 {
    (k.abs() * ln_rho).exp().ln_1p() / k
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DerivativeComparison {
    pub analytic: f64,
    pub finite_difference: f64,
    pub abs_deviation: f64,
    pub rel_deviation: f64,
}

impl DerivativeComparison {
    fn new(analytic: f64, finite_difference: f64) -> Self {
        let abs_deviation = (analytic - finite_difference).abs();
        Self {
            analytic,
            finite_difference,
            abs_deviation,
            rel_deviation: if analytic == 0.0 {
                abs_deviation
            } else {
                abs_deviation / analytic.abs()
            },
        }
    }

    /// Deviation within `max(rel * |analytic|, abs)`.
    pub fn agrees(&self, rel: f64, abs: f64) -> bool {
        self.abs_deviation <= (rel * self.analytic.abs()).max(abs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DerivativeReport {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub h: f64,
    pub f1: DerivativeComparison,
    pub f2: DerivativeComparison,
}

impl DerivativeReport {
    /// Both comparisons agree and the signs are `f1' > 0` (or `= 0` for
    /// `a = b`) and `f2' < 0`.
    pub fn passes(&self, rel: f64, abs: f64) -> bool {
        let f1_sign = if self.a == self.b {
            self.f1.analytic == 0.0
        } else {
            self.f1.analytic > 0.0
        };
        f1_sign && self.f2.analytic < 0.0 && self.f1.agrees(rel, abs) && self.f2.agrees(rel, abs)
    }
}

fn central_difference(
    kind: impl Fn(Order) -> MeanKind,
    p: PositivePair,
    k: f64,
    h: f64,
) -> Result<f64, VerifyError> {
    let at = |k: f64| -> Result<f64, VerifyError> { Ok(ln_eval_mean(kind(Order::new(k)?), p)?) };
    Ok((at(k + h)? - at(k - h)?) / (2.0 * h))
}

/// Compares the analytic logarithmic derivatives of `A_k` and
/// `(a^k + b^k)^{1/k}` with central differences of their logarithms.
pub fn derivative_consistency(
    p: PositivePair,
    k: f64,
    h: f64,
) -> Result<DerivativeReport, VerifyError> {
    if !(k.is_finite() && k != 0.0) {
        return Err(VerifyError::Config(format!(
            "k must be finite and nonzero, got {k}"
        )));
    }
    if !(h > 0.0 && h < k.abs() / 4.0) {
        return Err(VerifyError::Config(format!(
            "step h = {h} must satisfy 0 < h < |k|/4 = {}",
            k.abs() / 4.0
        )));
    }
    let order = Order::new(k)?;
    let t = power_transform(p, order)?;
    let d1 = log_derivative_f1(t, order)?;
    let d2 = log_derivative_f2(t, order)?;
    let fd1 = central_difference(MeanKind::PowerMean, p, k, h)?;
    let fd2 = central_difference(MeanKind::UnnormalizedPower, p, k, h)?;
    Ok(DerivativeReport {
        a: p.a(),
        b: p.b(),
        k,
        h,
        f1: DerivativeComparison::new(d1, fd1),
        f2: DerivativeComparison::new(d2, fd2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum TightnessPath {
    /// `b = a (1 + 10^{-j})`.
    ContractToDiagonal { a: f64 },
    /// `b = a 10^j`.
    BlowUpRatio { a: f64 },
}

impl TightnessPath {
    pub fn point(&self, j: u32, params: Params) -> Point {
        match *self {
            TightnessPath::ContractToDiagonal { a } => {
                Point::with_params(a, a * (1.0 + 10f64.powi(-(j as i32))), params)
            }
            TightnessPath::BlowUpRatio { a } => {
                Point::with_params(a, a * 10f64.powi(j as i32), params)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TightnessSeries {
    pub spec_id: String,
    pub path: TightnessPath,
    pub params: Params,
    pub points: Vec<Point>,
    /// All gaps of the chain per step, in double-double, rounded.
    pub gaps: Vec<Vec<f64>>,
    pub min_gaps: Vec<f64>,
    /// Why the series stopped early, if it did.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<String>,
}

impl TightnessSeries {
    /// `min_gaps` strictly decreasing.
    pub fn decreasing(&self) -> bool {
        self.min_gaps.windows(2).all(|w| w[1] < w[0])
    }

    /// Gap number `i` of the chain along the series.
    pub fn comparison(&self, i: usize) -> Vec<f64> {
        self.gaps.iter().filter_map(|g| g.get(i).copied()).collect()
    }
}

/// Gaps of `spec` along `path` for `j = 1..=steps`, evaluated in
/// double-double so that gaps far below the double rounding level still
/// resolve. `params` defaults to the spec's endpoint values.
pub fn tightness_scan(
    spec: &InequalitySpec,
    path: TightnessPath,
    steps: u32,
    params: Option<Params>,
) -> Result<TightnessSeries, VerifyError> {
    let base = match path {
        TightnessPath::ContractToDiagonal { a } | TightnessPath::BlowUpRatio { a } => a,
    };
    if !(base > 0.0 && base.is_finite()) {
        return Err(VerifyError::Config(format!(
            "path start a = {base} must be positive"
        )));
    }
    let params = params.unwrap_or(spec.endpoint);
    let mut series = TightnessSeries {
        spec_id: spec.id.clone(),
        path,
        params,
        points: vec![],
        gaps: vec![],
        min_gaps: vec![],
        truncated: None,
    };
    for j in 1..=steps {
        let p = path.point(j, params);
        if let Err(cause) = spec.domain.admit(&p) {
            series.truncated = Some(format!("step {j}: {cause}"));
            break;
        }
        if p.a == p.b || !p.b.is_finite() {
            series.truncated = Some(format!("step {j}: b is not distinct from a"));
            break;
        }
        let gaps = match extended_gaps(spec, &p) {
            Ok(g) => g.iter().map(|g| g.to_f64()).collect::<Vec<_>>(),
            Err(e) => {
                series.truncated = Some(format!("step {j}: {e}"));
                break;
            }
        };
        series
            .min_gaps
            .push(gaps.iter().copied().fold(f64::INFINITY, f64::min));
        series.gaps.push(gaps);
        series.points.push(p);
    }
    Ok(series)
}
