//! Domain predicates over `(a, b, k, β, k2)`.

use serde::{Deserialize, Serialize};

use super::{Param, Point};

/// One side of an interval; infinite bounds are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Bound {
    pub value: f64,
    pub inclusive: bool,
}

impl Bound {
    pub const fn open(value: f64) -> Self {
        Self {
            value,
            inclusive: false,
        }
    }

    pub const fn closed(value: f64) -> Self {
        Self {
            value,
            inclusive: true,
        }
    }

    pub const UNBOUNDED_BELOW: Bound = Bound::open(f64::NEG_INFINITY);
    pub const UNBOUNDED_ABOVE: Bound = Bound::open(f64::INFINITY);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Constraint {
    /// `b > a`.
    BGreaterThanA,
    /// `lo (<|<=) param (<|<=) hi`.
    Range { param: Param, lo: Bound, hi: Bound },
    /// `first < second`.
    Ordered(Param, Param),
    /// Both parameters nonzero and of the same sign.
    SameSign(Param, Param),
}

impl Constraint {
    pub const fn range(param: Param, lo: Bound, hi: Bound) -> Self {
        Constraint::Range { param, lo, hi }
    }

    /// `None` if satisfied, otherwise the reason.
    fn violation(&self, p: &Point) -> Option<String> {
        let missing = |param: Param| {
            p.get(param)
                .is_none()
                .then(|| format!("{} is required", param.name()))
        };
        match *self {
            Constraint::BGreaterThanA => (p.b <= p.a).then(|| "requires b > a".to_string()),
            Constraint::Range { param, lo, hi } => {
                if let Some(m) = missing(param) {
                    return Some(m);
                }
                let v = p.get(param).unwrap_or(f64::NAN);
                let above = if lo.inclusive {
                    v >= lo.value
                } else {
                    v > lo.value
                };
                let below = if hi.inclusive {
                    v <= hi.value
                } else {
                    v < hi.value
                };
                (!(above && below))
                    .then(|| format!("{} = {v} is outside {}", param.name(), describe(lo, hi)))
            }
            Constraint::Ordered(x, y) => {
                if let Some(m) = missing(x).or_else(|| missing(y)) {
                    return Some(m);
                }
                let (u, v) = (p.get(x).unwrap_or(f64::NAN), p.get(y).unwrap_or(f64::NAN));
                (!(u < v)).then(|| format!("requires {} < {}", x.name(), y.name()))
            }
            Constraint::SameSign(x, y) => {
                if let Some(m) = missing(x).or_else(|| missing(y)) {
                    return Some(m);
                }
                let (u, v) = (p.get(x).unwrap_or(f64::NAN), p.get(y).unwrap_or(f64::NAN));
                let ok = (u > 0.0 && v > 0.0) || (u < 0.0 && v < 0.0);
                (!ok).then(|| {
                    format!(
                        "requires {} and {} nonzero with equal signs",
                        x.name(),
                        y.name()
                    )
                })
            }
        }
    }
}

fn describe(lo: Bound, hi: Bound) -> String {
    format!(
        "{}{}, {}{}",
        if lo.inclusive { '[' } else { '(' },
        lo.value,
        hi.value,
        if hi.inclusive { ']' } else { ')' }
    )
}

/// Conjunction of constraints.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Domain {
    pub constraints: Vec<Constraint>,
}

impl Domain {
    pub fn new(constraints: Vec<Constraint>) -> Self {
        Self { constraints }
    }

    /// `Ok` if the point is inside, otherwise the first violated constraint.
    pub fn admit(&self, p: &Point) -> Result<(), String> {
        if !(p.a > 0.0 && p.a.is_finite() && p.b > 0.0 && p.b.is_finite()) {
            return Err("a and b must be positive and finite".into());
        }
        for param in Param::ALL {
            if let Some(v) = p.get(param) {
                if !v.is_finite() {
                    return Err(format!("{} must be finite", param.name()));
                }
            }
        }
        match self.constraints.iter().find_map(|c| c.violation(p)) {
            Some(reason) => Err(reason),
            None => Ok(()),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.admit(p).is_ok()
    }

    pub fn requires_b_greater_than_a(&self) -> bool {
        self.constraints.contains(&Constraint::BGreaterThanA)
    }

    /// Tightest interval the range constraints allow for `param`.
    pub fn bounds(&self, param: Param) -> (Bound, Bound) {
        let mut lo = Bound::UNBOUNDED_BELOW;
        let mut hi = Bound::UNBOUNDED_ABOVE;
        for c in &self.constraints {
            if let Constraint::Range {
                param: q,
                lo: l,
                hi: h,
            } = *c
            {
                if q == param {
                    if l.value > lo.value || (l.value == lo.value && !l.inclusive) {
                        lo = l;
                    }
                    if h.value < hi.value || (h.value == hi.value && !h.inclusive) {
                        hi = h;
                    }
                }
            }
        }
        (lo, hi)
    }
}
