//! Seeded random + grid search with coordinate-descent refinement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Axis, SearchBox, VerifierConfig};
use crate::catalog::{extended_gaps, min_gap, Constraint, InequalitySpec, Point};
use crate::error::VerifyError;

/// At most this many violations are listed; `violationCount` has the total.
pub const MAX_REPORTED_VIOLATIONS: usize = 100;
const MAX_GRID_POINTS: usize = 1 << 24;
const INITIAL_REFINE_SPAN: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Violation {
    pub point: Point,
    /// Minimum gap in double precision.
    pub gap: f64,
    /// The same gap re-evaluated in double-double.
    pub extended_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FalsificationReport {
    pub spec_id: String,
    pub seed: u64,
    pub tolerance: f64,
    pub min_gap: f64,
    pub argmin: Point,
    pub samples_evaluated: usize,
    /// Samples outside the domain, on the diagonal, or not evaluable.
    pub samples_skipped: usize,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
}

impl FalsificationReport {
    pub fn holds(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    point: Point,
    gap: f64,
    violation: Option<(f64, f64)>,
}

/// Moves a sampled point into the domain where a symmetry allows it:
/// `a, b` are swapped for `b > a`, ordered parameters are sorted and a
/// parameter of the wrong sign is mirrored.
fn repair(spec: &InequalitySpec, mut p: Point) -> Point {
    for c in &spec.domain.constraints {
        if let Constraint::SameSign(x, y) = *c {
            if let (Some(u), Some(v)) = (p.get(x), p.get(y)) {
                if u * v < 0.0 {
                    p.params.set(x, -u);
                }
            }
        }
    }
    for c in &spec.domain.constraints {
        match *c {
            Constraint::Ordered(x, y) => {
                if let (Some(u), Some(v)) = (p.get(x), p.get(y)) {
                    if u > v {
                        p.params.set(x, v);
                        p.params.set(y, u);
                    }
                }
            }
            Constraint::BGreaterThanA if p.a > p.b => std::mem::swap(&mut p.a, &mut p.b),
            _ => {}
        }
    }
    p
}

fn extended_min_gap(spec: &InequalitySpec, p: &Point) -> Option<f64> {
    let gaps = extended_gaps(spec, p).ok()?;
    gaps.iter().map(|g| g.to_f64()).reduce(f64::min)
}

fn evaluate(
    spec: &InequalitySpec,
    bx: &SearchBox,
    axes: &[Axis],
    u: &[f64],
    tolerance: f64,
) -> Option<Sample> {
    let point = repair(spec, bx.point_at(axes, u));
    if point.a == point.b || !spec.domain_contains(&point) {
        return None;
    }
    let gap = min_gap(spec, &point).ok().filter(|g| !g.is_nan())?;
    if gap >= 0.0 {
        return Some(Sample {
            point,
            gap,
            violation: None,
        });
    }
    // negative gaps are re-evaluated; only the extended value can confirm
    // a violation
    let extended = extended_min_gap(spec, &point).unwrap_or(gap);
    Some(Sample {
        point,
        gap: extended,
        violation: (extended < -tolerance).then_some((gap, extended)),
    })
}

/// `true` if `x` should replace `best`: smaller gap, ties broken by the
/// lexicographically smaller point.
fn better(x: &Sample, best: &Sample) -> bool {
    x.gap < best.gap || (x.gap == best.gap && x.point.lex_cmp(&best.point).is_lt())
}

struct Search<'a> {
    spec: &'a InequalitySpec,
    tolerance: f64,
    evaluated: usize,
    skipped: usize,
    best: Option<(Sample, Vec<f64>)>,
    violation_count: usize,
    violations: Vec<Violation>,
}

impl Search<'_> {
    fn absorb(&mut self, u: Vec<f64>, sample: Option<Sample>) {
        self.evaluated += 1;
        let Some(s) = sample else {
            self.skipped += 1;
            return;
        };
        if let Some((gap, extended_gap)) = s.violation {
            self.violation_count += 1;
            if self.violations.len() < MAX_REPORTED_VIOLATIONS {
                self.violations.push(Violation {
                    point: s.point,
                    gap,
                    extended_gap,
                });
            }
        }
        let replace = match &self.best {
            None => true,
            Some((b, _)) => better(&s, b),
        };
        if replace {
            self.best = Some((s, u));
        }
    }

    fn run_batch(
        &mut self,
        cfg: &VerifierConfig,
        bx: &SearchBox,
        axes: &[Axis],
        batch: Vec<Vec<f64>>,
    ) -> Result<(), VerifyError> {
        let (spec, tol) = (self.spec, self.tolerance);
        let results: Vec<Option<Sample>> = cfg.install(|| {
            batch
                .par_iter()
                .map(|u| evaluate(spec, bx, axes, u, tol))
                .collect()
        })?;
        for (u, r) in batch.into_iter().zip(results) {
            self.absorb(u, r);
        }
        Ok(())
    }
}

fn grid(dims: usize, per_axis: usize) -> Result<Vec<Vec<f64>>, VerifyError> {
    let total = (0..dims)
        .try_fold(1usize, |acc, _| acc.checked_mul(per_axis))
        .filter(|&t| t <= MAX_GRID_POINTS)
        .ok_or_else(|| {
            VerifyError::Config(format!(
                "grid of {per_axis}^{dims} points exceeds {MAX_GRID_POINTS}"
            ))
        })?;
    let step = 1.0 / (per_axis - 1) as f64;
    Ok((0..total)
        .map(|mut idx| {
            (0..dims)
                .map(|_| {
                    let digit = idx % per_axis;
                    idx /= per_axis;
                    if digit == per_axis - 1 {
                        1.0
                    } else {
                        digit as f64 * step
                    }
                })
                .collect()
        })
        .collect())
}

/// Searches `box` for the smallest margin of `spec`.
///
/// Evaluates `nRandom` seeded points, then the full grid with
/// `gridPerAxis` points per axis (corners included), then `refineSteps`
/// rounds of coordinate descent around the incumbent, halving the step
/// each round. Points with a negative margin are re-evaluated in
/// double-double, whose value replaces the double one; a violation is
/// reported only if the extended margin is below `-tolerance`.
pub fn falsify(
    spec: &InequalitySpec,
    bx: &SearchBox,
    cfg: &VerifierConfig,
) -> Result<FalsificationReport, VerifyError> {
    cfg.validate()?;
    bx.check_against(spec)?;
    let axes = bx.axes();
    let dims = axes.len();
    let mut search = Search {
        spec,
        tolerance: cfg.tolerance,
        evaluated: 0,
        skipped: 0,
        best: None,
        violation_count: 0,
        violations: Vec::new(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let random: Vec<Vec<f64>> = (0..cfg.n_random)
        .map(|_| (0..dims).map(|_| rng.gen::<f64>()).collect())
        .collect();
    search.run_batch(cfg, bx, &axes, random)?;
    search.run_batch(cfg, bx, &axes, grid(dims, cfg.grid_per_axis)?)?;

    let mut span = INITIAL_REFINE_SPAN;
    for _ in 0..cfg.refine_steps {
        let Some((_, centre)) = search.best.clone() else {
            break;
        };
        let mut moves = Vec::with_capacity(2 * dims);
        for j in 0..dims {
            for sign in [-1.0, 1.0] {
                let mut u = centre.clone();
                u[j] = (u[j] + sign * span).clamp(0.0, 1.0);
                if u[j] != centre[j] {
                    moves.push(u);
                }
            }
        }
        search.run_batch(cfg, bx, &axes, moves)?;
        span *= 0.5;
    }

    let Some((best, _)) = search.best else {
        return Err(VerifyError::Config(format!(
            "{}: no sampled point lies in the domain",
            spec.id
        )));
    };
    Ok(FalsificationReport {
        spec_id: spec.id.clone(),
        seed: cfg.seed,
        tolerance: cfg.tolerance,
        min_gap: best.gap,
        argmin: best.point,
        samples_evaluated: search.evaluated,
        samples_skipped: search.skipped,
        violation_count: search.violation_count,
        violations: search.violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{lookup, Param};
    use crate::verifier::Interval;

    fn bx(id: &str, lo: f64, hi: f64) -> SearchBox {
        let r = Interval::new(lo, hi).unwrap();
        SearchBox::for_spec(lookup(id).unwrap(), r, r).unwrap()
    }

    fn cfg(n: usize, g: usize, refine: usize) -> VerifierConfig {
        VerifierConfig {
            seed: 42,
            n_random: n,
            grid_per_axis: g,
            refine_steps: refine,
            ..VerifierConfig::default()
        }
    }

    #[test]
    fn corner_grid_accounting() {
        for id in ["INEQ_2_5", "INEQ_1_2", "INEQ_1_3", "MONO_F1"] {
            let b = bx(id, 1e-3, 1e3);
            let r = falsify(lookup(id).unwrap(), &b, &cfg(0, 2, 0));
            let dims = b.axes().len();
            match r {
                Ok(r) => assert_eq!(r.samples_evaluated, 1 << dims, "{id}"),
                // every corner may be diagonal (a = b) for some boxes
                Err(e) => panic!("{id}: {e}"),
            }
        }
    }

    #[test]
    fn theorem_has_no_violations() {
        let r = falsify(
            lookup("INEQ_2_5").unwrap(),
            &bx("INEQ_2_5", 1e-3, 1e3),
            &cfg(2000, 5, 10),
        )
        .unwrap();
        assert!(r.holds());
        assert!(r.min_gap > 0.0);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn widened_domain_is_falsified() {
        let id = "INEQ_TEST_1_2_WIDE";
        let r = falsify(lookup(id).unwrap(), &bx(id, 1.0, 1e6), &cfg(1000, 4, 10)).unwrap();
        assert!(!r.holds());
        assert!(r.min_gap < -r.tolerance);
        assert!(r
            .violations
            .iter()
            .all(|v| v.extended_gap < 0.0 && v.gap < 0.0));
        assert!(r.argmin.params.k.unwrap() > 0.5);
    }

    #[test]
    fn repair_respects_constraints() {
        let spec = lookup("MONO_F2").unwrap();
        let p = repair(
            spec,
            Point::new(1.0, 2.0)
                .with(Param::K, 3.0)
                .with(Param::K2, -1.0),
        );
        assert_eq!((p.params.k, p.params.k2), (Some(-3.0), Some(-1.0)));
        let spec = lookup("INEQ_1_1").unwrap();
        let p = repair(spec, Point::new(3.0, 2.0).with(Param::K, 0.5));
        assert_eq!((p.a, p.b), (2.0, 3.0));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let spec = lookup("INEQ_1_3").unwrap();
        let b = bx("INEQ_1_3", 1e-3, 1e3);
        let mut c = cfg(3000, 4, 15);
        let one = falsify(spec, &b, &c).unwrap();
        c.threads = 4;
        let four = falsify(spec, &b, &c).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn rejects_bad_configs() {
        let spec = lookup("INEQ_1_2").unwrap();
        let mut c = cfg(10, 1, 0);
        assert!(falsify(spec, &bx("INEQ_1_2", 1.0, 2.0), &c).is_err());
        c.grid_per_axis = 2;
        let no_k = SearchBox::new(
            Interval::new(1.0, 2.0).unwrap(),
            Interval::new(1.0, 2.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            falsify(spec, &no_k, &c),
            Err(VerifyError::Config(_))
        ));
    }
}
