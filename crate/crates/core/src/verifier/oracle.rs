//! Double path against the double-double oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SearchBox;
use crate::error::VerifyError;
use crate::extended::{extended_eval, DoubleDouble};
use crate::means::{eval_mean, MeanKind, PositivePair};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleReport {
    pub kind: MeanKind,
    pub samples: usize,
    pub max_deviation: f64,
    pub worst: PositivePair,
}

/// Maximum of `|eval_mean - extended_eval| / extended_eval` over `n`
/// seeded log-uniform points of `box` (parameter ranges are ignored).
pub fn oracle_compare(
    kind: MeanKind,
    bx: &SearchBox,
    n: usize,
    seed: u64,
) -> Result<OracleReport, VerifyError> {
    kind.validate()?;
    if n == 0 {
        return Err(VerifyError::Config("oracle comparison needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (la, ha) = (bx.a_range.lo.ln(), bx.a_range.hi.ln());
    let (lb, hb) = (bx.b_range.lo.ln(), bx.b_range.hi.ln());
    let mut worst = (f64::NEG_INFINITY, PositivePair::new(1.0, 1.0)?);
    for _ in 0..n {
        let a = rng.gen_range(la..=ha).exp();
        let b = rng.gen_range(lb..=hb).exp();
        let p = PositivePair::new(a, b)?;
        let v = eval_mean(kind, p)?;
        let x = extended_eval(kind, p)?;
        let dev = ((DoubleDouble::from(v) - x) / x).abs().to_f64();
        if dev > worst.0 {
            worst = (dev, p);
        }
    }
    Ok(OracleReport {
        kind,
        samples: n,
        max_deviation: worst.0,
        worst: worst.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::means::Order;
    use crate::verifier::Interval;

    fn bx(lo: f64, hi: f64) -> SearchBox {
        let r = Interval::new(lo, hi).unwrap();
        SearchBox::new(r, r).unwrap()
    }

    #[test]
    fn arithmetic_mean_is_within_an_ulp() {
        let r = oracle_compare(MeanKind::ARITHMETIC, &bx(1e-3, 1e3), 100, 1).unwrap();
        assert!(r.max_deviation <= f64::EPSILON);
    }

    #[test]
    fn identric_and_near_zero_order() {
        let r = oracle_compare(MeanKind::Identric, &bx(1e-2, 1e2), 10_000, 7).unwrap();
        assert!(r.max_deviation <= 1e-13);
        let kind = MeanKind::PowerMean(Order::new(1e-9).unwrap());
        let r = oracle_compare(kind, &bx(0.5, 2.0), 1000, 3).unwrap();
        assert!(r.max_deviation <= 1e-10);
    }

    #[test]
    fn deterministic() {
        let k = MeanKind::PowerMean(Order::new(-3.5).unwrap());
        assert_eq!(
            oracle_compare(k, &bx(1e-2, 1e2), 500, 9).unwrap(),
            oracle_compare(k, &bx(1e-2, 1e2), 500, 9).unwrap()
        );
    }
}
