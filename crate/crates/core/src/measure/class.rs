use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::models::{BernoulliModel, PredictiveModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassTag {
    /// Finite truncation `{p/q ∈ [0,1] : q ≤ max_denominator}` of a dense set.
    /// Mesh spacing is at most `1 / max_denominator`.
    Dense { max_denominator: u32 },
    /// No member lies strictly between `lo` and `hi`; both are members.
    Gapped { lo: BigRational, hi: BigRational },
    Custom,
}

/// A finite set of Bernoulli parameters, in enumeration order.
#[derive(Clone, PartialEq, Eq)]
pub struct ParamClass {
    thetas: Vec<BigRational>,
    tag: ClassTag,
}

/// Rationals `p/q` in `[0, 1]` with `q ≤ max_q`, reduced and deduplicated,
/// enumerated by denominator and then numerator: 0, 1, 1/2, 1/3, 2/3, 1/4, ...
pub fn rationals_up_to(max_q: u32) -> Vec<BigRational> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for q in 1..=max_q.max(1) {
        for p in 0..=q {
            let r = BigRational::new(BigInt::from(p), BigInt::from(q));
            if seen.insert(r.clone()) {
                out.push(r);
            }
        }
    }
    out
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl ParamClass {
    pub fn dense(max_denominator: u32) -> Result<Self> {
        if max_denominator == 0 {
            return Err(Error::InvalidParameter("dense class needs Q ≥ 1".into()));
        }
        Ok(ParamClass {
            thetas: rationals_up_to(max_denominator),
            tag: ClassTag::Dense { max_denominator },
        })
    }

    /// A class with a gap `(lo, hi)`. Fails unless `[lo, hi] ∩ thetas = {lo, hi}`
    /// and `0 < lo < hi < 1`.
    pub fn gapped(thetas: Vec<BigRational>, lo: BigRational, hi: BigRational) -> Result<Self> {
        check_unit_interval(&thetas)?;
        if !(BigRational::zero() < lo && lo < hi && hi < BigRational::one()) {
            return Err(Error::InvalidParameter(format!(
                "gap endpoints must satisfy 0 < lo < hi < 1, got {lo}, {hi}"
            )));
        }
        let inside: Vec<_> = thetas.iter().filter(|t| **t >= lo && **t <= hi).collect();
        let has_lo = inside.iter().any(|t| **t == lo);
        let has_hi = inside.iter().any(|t| **t == hi);
        let distinct: BTreeSet<_> = inside.iter().collect();
        if !has_lo || !has_hi || distinct.len() != 2 {
            return Err(Error::InvalidParameter(format!(
                "[{lo}, {hi}] ∩ Θ must be exactly the two endpoints"
            )));
        }
        Ok(ParamClass {
            thetas,
            tag: ClassTag::Gapped { lo, hi },
        })
    }

    /// `([0, lo] ∪ [hi, 1]) ∩ {p/q : q ≤ max_q}`.
    pub fn gapped_rationals(max_q: u32, lo: BigRational, hi: BigRational) -> Result<Self> {
        let mut thetas: Vec<_> = rationals_up_to(max_q)
            .into_iter()
            .filter(|t| *t <= lo || *t >= hi)
            .collect();
        for endpoint in [&lo, &hi] {
            if !thetas.contains(endpoint) {
                thetas.push(endpoint.clone());
            }
        }
        Self::gapped(thetas, lo, hi)
    }

    pub fn custom(thetas: Vec<BigRational>) -> Result<Self> {
        check_unit_interval(&thetas)?;
        Ok(ParamClass {
            thetas,
            tag: ClassTag::Custom,
        })
    }

    pub fn thetas(&self) -> &[BigRational] {
        &self.thetas
    }

    pub fn tag(&self) -> &ClassTag {
        &self.tag
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn contains(&self, theta: &BigRational) -> bool {
        self.thetas.contains(theta)
    }

    pub fn gap(&self) -> Option<(&BigRational, &BigRational)> {
        match &self.tag {
            ClassTag::Gapped { lo, hi } => Some((lo, hi)),
            _ => None,
        }
    }

    /// Largest distance between consecutive members, sorted.
    pub fn mesh(&self) -> f64 {
        let mut v: Vec<f64> = self.thetas.iter().filter_map(|t| t.to_f64()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn models(&self) -> Result<Vec<Arc<dyn PredictiveModel>>> {
        self.thetas
            .iter()
            .map(|t| Ok(Arc::new(BernoulliModel::new(t.clone())?) as Arc<dyn PredictiveModel>))
            .collect()
    }
}

fn check_unit_interval(thetas: &[BigRational]) -> Result<()> {
    if thetas.is_empty() {
        return Err(Error::InvalidParameter("parameter class is empty".into()));
    }
    let distinct: BTreeSet<_> = thetas.iter().collect();
    if distinct.len() != thetas.len() {
        return Err(Error::InvalidParameter("duplicate parameters in class".into()));
    }
    match thetas
        .iter()
        .find(|t| **t < BigRational::zero() || **t > BigRational::one())
    {
        Some(t) => Err(Error::InvalidParameter(format!("θ = {t} outside [0, 1]"))),
        None => Ok(()),
    }
}

impl fmt::Debug for ParamClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.thetas.iter().map(|t| t.to_string()).collect();
        write!(f, "ParamClass({:?}, {{{}}})", self.tag, list.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn farey_enumeration_order() {
        let got: Vec<String> = rationals_up_to(4).iter().map(|r| r.to_string()).collect();
        assert_eq!(got, ["0", "1", "1/2", "1/3", "2/3", "1/4", "3/4"]);
        // |F_8| = 23
        assert_eq!(ParamClass::dense(8).unwrap().len(), 23);
    }

    #[test]
    fn dense_mesh_is_bounded_by_one_over_q() {
        let c = ParamClass::dense(8).unwrap();
        assert!(c.mesh() <= 1.0 / 8.0 + 1e-15);
    }

    #[test]
    fn gap_validation() {
        assert!(ParamClass::gapped(vec![ratio(1, 4), ratio(1, 2)], ratio(1, 4), ratio(1, 2)).is_ok());
        let err = ParamClass::gapped(
            vec![ratio(1, 4), ratio(1, 3), ratio(1, 2)],
            ratio(1, 4),
            ratio(1, 2),
        );
        assert!(err.is_err());
        assert!(ParamClass::gapped(vec![ratio(1, 4)], ratio(1, 4), ratio(1, 2)).is_err());
    }

    #[test]
    fn gapped_rationals_excludes_interior() {
        let c = ParamClass::gapped_rationals(8, ratio(1, 4), ratio(1, 2)).unwrap();
        assert!(c.contains(&ratio(1, 4)) && c.contains(&ratio(1, 2)));
        assert!(!c.contains(&ratio(1, 3)) && !c.contains(&ratio(2, 7)) && !c.contains(&ratio(3, 8)));
        assert!(c.contains(&ratio(1, 8)) && c.contains(&ratio(5, 8)) && c.contains(&ratio(0, 1)));
    }

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        assert!(ParamClass::custom(vec![ratio(1, 2), ratio(2, 4)]).is_err());
        assert!(ParamClass::custom(vec![ratio(3, 2)]).is_err());
        assert!(ParamClass::custom(vec![]).is_err());
    }
}
