//! The inequality catalog.
//!
//! Every inequality is a chain `c_0 < c_1 < ... < c_n` of [`MeanExpr`]s
//! together with a [`Domain`] over `(a, b, k, β, k2)`. Evaluating a chain at
//! a point yields relative gaps `(c_{i+1} - c_i) / c_{i+1}`, positive when the
//! inequality holds; see [`margin`] and [`check`].

mod domain;
mod expr;
mod margin;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{MeanError, Result};

pub use domain::{Bound, Constraint, Domain};
pub use expr::{ArgTransform, ExprKind, MeanExpr, OrderRule, ScaleRule};
pub use margin::{check, extended_gaps, margin, min_gap, MarginReport, Verdict};

/// A free parameter of an inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Param {
    K,
    Beta,
    K2,
}

impl Param {
    pub const ALL: [Param; 3] = [Param::K, Param::Beta, Param::K2];

    pub fn name(self) -> &'static str {
        match self {
            Param::K => "k",
            Param::Beta => "beta",
            Param::K2 => "k2",
        }
    }
}

/// Values for the free parameters; unused ones stay `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
}

impl Params {
    pub fn get(&self, param: Param) -> Option<f64> {
        match param {
            Param::K => self.k,
            Param::Beta => self.beta,
            Param::K2 => self.k2,
        }
    }

    pub fn set(&mut self, param: Param, v: f64) {
        match param {
            Param::K => self.k = Some(v),
            Param::Beta => self.beta = Some(v),
            Param::K2 => self.k2 = Some(v),
        }
    }
}

/// A point `(a, b)` plus whatever parameters the inequality needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Point {
    pub a: f64,
    pub b: f64,
    #[serde(flatten)]
    pub params: Params,
}

impl Point {
    pub fn new(a: f64, b: f64) -> Self {
        Self {
            a,
            b,
            params: Params::default(),
        }
    }

    pub fn with_params(a: f64, b: f64, params: Params) -> Self {
        Self { a, b, params }
    }

    pub fn with(mut self, param: Param, v: f64) -> Self {
        self.params.set(param, v);
        self
    }

    pub fn get(&self, param: Param) -> Option<f64> {
        self.params.get(param)
    }

    pub fn require(&self, param: Param) -> Result<f64> {
        self.get(param)
            .ok_or_else(|| MeanError::Domain(format!("{} is required", param.name())))
    }

    /// The same point with `a`, `b` multiplied by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            a: self.a * lambda,
            b: self.b * lambda,
            params: self.params,
        }
    }

    /// Lexicographic order on `(a, b, k, β, k2)`, absent parameters first.
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        let key = |p: &Point| {
            [
                p.a,
                p.b,
                p.params.k.unwrap_or(f64::NEG_INFINITY),
                p.params.beta.unwrap_or(f64::NEG_INFINITY),
                p.params.k2.unwrap_or(f64::NEG_INFINITY),
            ]
        };
        let (x, y) = (key(self), key(other));
        x.iter()
            .zip(y.iter())
            .map(|(u, v)| u.total_cmp(v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Maximum chain length supported by the allocation-free evaluators.
pub const MAX_CHAIN: usize = 4;

/// A declarative inequality `chain[0] < chain[1] < ...` on `domain`,
/// strict for distinct `a`, `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InequalitySpec {
    pub id: String,
    pub chain: Vec<MeanExpr>,
    pub domain: Domain,
    pub free_params: Vec<Param>,
    /// Human-readable statement of the claim.
    pub statement: String,
    /// Parameter values at which the constants are attained in the limit;
    /// used as defaults by the tightness scans.
    pub endpoint: Params,
    /// Whether every gap vanishes at `a = b`.
    pub collapses_on_diagonal: bool,
}

impl InequalitySpec {
    fn new(
        id: &str,
        statement: &str,
        chain: Vec<MeanExpr>,
        constraints: Vec<Constraint>,
        free_params: Vec<Param>,
        endpoint: Params,
    ) -> Self {
        assert!((2..=MAX_CHAIN).contains(&chain.len()), "{id}: chain length");
        let collapses_on_diagonal = chain.iter().all(|e| e.scale == ScaleRule::ONE)
            && chain
                .iter()
                .all(|e| !matches!(e.kind, ExprKind::UnnormalizedPower(_)));
        Self {
            id: id.to_string(),
            chain,
            domain: Domain::new(constraints),
            free_params,
            statement: statement.to_string(),
            endpoint,
            collapses_on_diagonal,
        }
    }

    pub fn domain_contains(&self, point: &Point) -> bool {
        self.domain.contains(point)
    }
}

const fn params(k: Option<f64>, beta: Option<f64>, k2: Option<f64>) -> Params {
    Params { k, beta, k2 }
}

fn pm(order: OrderRule) -> MeanExpr {
    MeanExpr::mean(ExprKind::PowerMean(order))
}

fn fixed(k: f64) -> OrderRule {
    OrderRule::Fixed(k)
}

fn free(p: Param) -> OrderRule {
    OrderRule::Free(p)
}

fn he() -> MeanExpr {
    MeanExpr::mean(ExprKind::Heronian)
}

fn ident() -> MeanExpr {
    MeanExpr::mean(ExprKind::Identric)
}

fn s_mean() -> MeanExpr {
    MeanExpr::mean(ExprKind::SMean)
}

fn k_in(lo: Bound, hi: Bound) -> Constraint {
    Constraint::range(Param::K, lo, hi)
}

const TWO_THIRDS: f64 = 2.0 / 3.0;

fn build_catalog() -> Vec<InequalitySpec> {
    use Param::{Beta, K, K2};
    let none = Params::default();
    vec![
        InequalitySpec::new(
            "INEQ_1_1",
            "a^(1-k) I(a^k, b^k) < A_k(a, b) for 0 < k <= 1, b > a",
            vec![ident().lifted(K).times_a_pow_one_minus(K), pm(free(K))],
            vec![
                k_in(Bound::open(0.0), Bound::closed(1.0)),
                Constraint::BGreaterThanA,
            ],
            vec![K],
            params(Some(1.0), None, None),
        ),
        InequalitySpec::new(
            "INEQ_1_2",
            "A_k(a, b) < I(a, b) for 0 < k <= 1/2",
            vec![pm(free(K)), ident()],
            vec![k_in(Bound::open(0.0), Bound::closed(0.5))],
            vec![K],
            params(Some(0.5), None, None),
        ),
        InequalitySpec::new(
            "INEQ_1_3",
            "He(a^k, b^k) < A_beta(a^k, b^k) < 3 2^(-1/beta) He(a^k, b^k) for k > 0, beta >= 2/3",
            vec![
                he().lifted(K),
                pm(free(Beta)).lifted(K),
                he().lifted(K)
                    .scaled(ScaleRule::two_pow_over(3.0, Beta, -1.0)),
            ],
            vec![
                k_in(Bound::open(0.0), Bound::UNBOUNDED_ABOVE),
                Constraint::range(Beta, Bound::closed(TWO_THIRDS), Bound::UNBOUNDED_ABOVE),
            ],
            vec![K, Beta],
            params(Some(1.0), Some(TWO_THIRDS), None),
        ),
        InequalitySpec::new(
            "INEQ_1_4",
            "A_k < S < 2^(1/k) A_k for 0 < k <= 2",
            vec![
                pm(free(K)),
                s_mean(),
                pm(free(K)).scaled(ScaleRule::two_pow_over(1.0, K, 1.0)),
            ],
            vec![k_in(Bound::open(0.0), Bound::closed(2.0))],
            vec![K],
            params(Some(2.0), None, None),
        ),
        InequalitySpec::new(
            "INEQ_2_3",
            "(A + G)/2 < (2A + G)/3 < I",
            vec![
                MeanExpr::mean(ExprKind::Blend {
                    arithmetic: 0.5,
                    geometric: 0.5,
                }),
                MeanExpr::mean(ExprKind::Blend {
                    arithmetic: 2.0 / 3.0,
                    geometric: 1.0 / 3.0,
                }),
                ident(),
            ],
            vec![],
            vec![],
            none,
        ),
        InequalitySpec::new(
            "INEQ_2_4",
            "A_(2/3) < 3/(2 sqrt 2) He",
            vec![
                pm(fixed(TWO_THIRDS)),
                he().scaled(ScaleRule::constant(3.0, -1.5)),
            ],
            vec![],
            vec![],
            none,
        ),
        InequalitySpec::new(
            "INEQ_2_5",
            "A_2 < S < sqrt 2 A_2",
            vec![
                pm(fixed(2.0)),
                s_mean(),
                pm(fixed(2.0)).scaled(ScaleRule::constant(1.0, 0.5)),
            ],
            vec![],
            vec![],
            none,
        ),
        InequalitySpec::new(
            "INEQ_I_LT_A",
            "I < A",
            vec![ident(), pm(fixed(1.0))],
            vec![],
            vec![],
            none,
        ),
        InequalitySpec::new(
            "INEQ_HE_LT_A23",
            "He < A_(2/3)",
            vec![he(), pm(fixed(TWO_THIRDS))],
            vec![],
            vec![],
            none,
        ),
        InequalitySpec::new(
            "MONO_F1",
            "A_k < A_k2 for k < k2",
            vec![pm(free(K)), pm(free(K2))],
            vec![Constraint::Ordered(K, K2)],
            vec![K, K2],
            params(Some(1.0), None, Some(2.0)),
        ),
        // k^2 f2'/f2 = (x ln x + y ln y)/(x + y) - ln(x + y) < 0, so f2 decreases
        // on each half-line; across k = 0 it jumps from below min(a, b) to
        // above max(a, b), hence the sign restriction.
        InequalitySpec::new(
            "MONO_F2",
            "(a^k2 + b^k2)^(1/k2) < (a^k + b^k)^(1/k) for 0 < k < k2 or k < k2 < 0",
            vec![
                MeanExpr::mean(ExprKind::UnnormalizedPower(free(K2))),
                MeanExpr::mean(ExprKind::UnnormalizedPower(free(K))),
            ],
            vec![Constraint::Ordered(K, K2), Constraint::SameSign(K, K2)],
            vec![K, K2],
            params(Some(1.0), None, Some(2.0)),
        ),
    ]
}

fn build_sub_checks() -> Vec<InequalitySpec> {
    let mut stated = build_catalog()
        .into_iter()
        .find(|s| s.id == "INEQ_1_4")
        .expect("INEQ_1_4 is in the catalog");
    stated.id = "INEQ_1_4_STATED".into();
    stated.statement = "A_k < S < 2^(1/k) A_k for 1 <= k <= 2".into();
    stated.domain = Domain::new(vec![k_in(Bound::closed(1.0), Bound::closed(2.0))]);
    vec![stated]
}

fn build_fixtures() -> Vec<InequalitySpec> {
    use Param::K;
    vec![
        InequalitySpec::new(
            "INEQ_TEST_FALSE",
            "A_(2/3) < 1.0 He (false: the constant is too small)",
            vec![pm(fixed(TWO_THIRDS)), he()],
            vec![],
            vec![],
            Params::default(),
        ),
        InequalitySpec::new(
            "INEQ_TEST_A_LT_I",
            "A < I (false: I < A)",
            vec![pm(fixed(1.0)), ident()],
            vec![],
            vec![],
            Params::default(),
        ),
        InequalitySpec::new(
            "INEQ_TEST_1_2_WIDE",
            "A_k < I for 0 < k <= 1 (false for k near 1)",
            vec![pm(free(K)), ident()],
            vec![k_in(Bound::open(0.0), Bound::closed(1.0))],
            vec![K],
            params(Some(1.0), None, None),
        ),
    ]
}

/// The eleven catalog inequalities, in a fixed order.
pub fn catalog() -> &'static [InequalitySpec] {
    static CATALOG: OnceLock<Vec<InequalitySpec>> = OnceLock::new();
    CATALOG.get_or_init(build_catalog)
}

/// Restrictions of catalog entries to narrower domains that are checked
/// alongside them (currently `INEQ_1_4` on `1 <= k <= 2`).
pub fn sub_checks() -> &'static [InequalitySpec] {
    static SUB: OnceLock<Vec<InequalitySpec>> = OnceLock::new();
    SUB.get_or_init(build_sub_checks)
}

/// Deliberately false inequalities used as negative controls.
pub fn fixtures() -> &'static [InequalitySpec] {
    static FIXTURES: OnceLock<Vec<InequalitySpec>> = OnceLock::new();
    FIXTURES.get_or_init(build_fixtures)
}

/// Finds a spec by id among the catalog, sub-checks and fixtures.
pub fn lookup(id: &str) -> Option<&'static InequalitySpec> {
    catalog()
        .iter()
        .chain(sub_checks())
        .chain(fixtures())
        .find(|s| s.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn eleven_unique_entries() {
        assert_eq!(catalog().len(), 11);
        let ids: HashSet<_> = catalog()
            .iter()
            .chain(sub_checks())
            .chain(fixtures())
            .map(|s| s.id.as_str())
            .collect();
        assert_eq!(ids.len(), 11 + sub_checks().len() + fixtures().len());
        assert_eq!(catalog()[0].id, "INEQ_1_1");
        assert_eq!(catalog()[10].id, "MONO_F2");
    }

    #[test]
    fn domain_examples() {
        let s = lookup("INEQ_1_2").unwrap();
        assert!(!s.domain_contains(&Point::new(1.0, 2.0).with(Param::K, 0.6)));
        let s = lookup("INEQ_1_1").unwrap();
        assert!(!s.domain_contains(&Point::new(2.0, 1.0).with(Param::K, 0.5)));
        assert!(s.domain_contains(&Point::new(1.0, 2.0).with(Param::K, 0.5)));
    }

    #[test]
    fn free_params_match_domain() {
        for s in catalog().iter().chain(sub_checks()).chain(fixtures()) {
            let mut p = Point::with_params(1.0, 2.0, s.endpoint);
            assert!(s.domain_contains(&p), "{} endpoint", s.id);
            for &f in &s.free_params {
                assert!(
                    s.endpoint.get(f).is_some(),
                    "{} lacks endpoint {}",
                    s.id,
                    f.name()
                );
            }
            if let Some(&f) = s.free_params.first() {
                p.params = Params::default();
                assert!(
                    !s.domain_contains(&p),
                    "{} accepts a point without {}",
                    s.id,
                    f.name()
                );
            }
        }
    }

    #[test]
    fn lex_order() {
        let p = Point::new(1.0, 2.0);
        assert!(p.lex_cmp(&Point::new(1.0, 3.0)).is_lt());
        assert!(p
            .with(Param::K, 1.0)
            .lex_cmp(&p.with(Param::K, 0.5))
            .is_gt());
        assert!(p.lex_cmp(&p).is_eq());
    }

    #[test]
    fn point_json_omits_absent_params() {
        let p = Point::new(1.0, 2.0).with(Param::Beta, 0.75);
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"a":1.0,"b":2.0,"beta":0.75}"#
        );
        let back: Point = serde_json::from_str(r#"{"a":1.0,"b":2.0,"beta":0.75}"#).unwrap();
        assert_eq!(back, p);
    }
}
