use num_rational::BigRational;

use super::Mixture;
use crate::error::{Error, Result};
use crate::measure::{
    joint, joint_exact, Alphabet, ExactProb, LogProb, PredictiveModel, Seq,
    DEFAULT_ORACLE_HORIZON, EXACT_IDENTITY_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Exact rationals; limited to the oracle horizon.
    Exact,
    /// Log-domain `f64`.
    Float,
}

/// Smallest dominance slack `ξ(x) / (w_ν ν(x))` found for one component.
#[derive(Debug, Clone)]
pub struct ComponentSlack {
    pub name: String,
    pub min_slack: f64,
    /// Exact minimum, when the rational backend ran.
    pub min_slack_exact: Option<BigRational>,
    pub at: Seq,
}

#[derive(Debug, Clone)]
pub struct DominanceReport {
    pub passed: bool,
    pub horizon: usize,
    pub backend: Backend,
    pub checks: usize,
    pub components: Vec<ComponentSlack>,
}

impl DominanceReport {
    pub fn min_slack(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.min_slack)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn worst(&self) -> Option<&ComponentSlack> {
        self.components
            .iter()
            .min_by(|a, b| crate::measure::cmp_f64(a.min_slack, b.min_slack))
    }
}

/// Verifies `ξ(x) ≥ w_ν ν(x)` for every component and every `x` with
/// `ℓ(x) ≤ horizon`. Failures are reported, not raised.
pub fn dominance_check(mix: &Mixture, horizon: usize, backend: Backend) -> Result<DominanceReport> {
    let weighted: Vec<(BigRational, &dyn PredictiveModel)> = mix
        .components()
        .iter()
        .map(|c| (c.weight().clone(), c.model()))
        .collect();
    match backend {
        Backend::Exact => dominance_check_exact_with(
            |x| mix.mix_joint_exact(x),
            &weighted,
            mix.alphabet(),
            horizon,
        ),
        Backend::Float => {
            dominance_check_float_with(|x| mix.mix_joint(x), &weighted, mix.alphabet(), horizon)
        }
    }
}

/// Exact dominance check of an arbitrary `ξ` against weighted models.
pub fn dominance_check_exact_with<F>(
    xi: F,
    weighted: &[(BigRational, &dyn PredictiveModel)],
    alphabet: Alphabet,
    horizon: usize,
) -> Result<DominanceReport>
where
    F: Fn(&[u8]) -> Result<ExactProb>,
{
    if horizon > DEFAULT_ORACLE_HORIZON {
        return Err(Error::OracleHorizonExceeded {
            len: horizon,
            horizon: DEFAULT_ORACLE_HORIZON,
        });
    }
    let mut best: Vec<Option<(BigRational, Seq)>> = vec![None; weighted.len()];
    let mut checks = 0;
    let mut passed = true;
    for x in alphabet.strings_up_to(horizon) {
        let xi_x = xi(&x)?;
        for (slot, (w, model)) in best.iter_mut().zip(weighted) {
            let nu = joint_exact(*model, &x)?;
            checks += 1;
            if nu.is_zero() {
                continue;
            }
            let bound = &ExactProb::new(w.clone()) * &nu;
            if xi_x < bound {
                passed = false;
            }
            let slack = (&xi_x / &bound).into_inner();
            if slot.as_ref().is_none_or(|(s, _)| slack < *s) {
                *slot = Some((slack, x.clone()));
            }
        }
    }
    let components = weighted
        .iter()
        .zip(best)
        .map(|((_, model), slot)| {
            let (exact, at) = slot.map_or((None, Seq::empty()), |(s, x)| (Some(s), x));
            ComponentSlack {
                name: model.name().to_string(),
                min_slack: exact
                    .as_ref()
                    .map_or(f64::INFINITY, |s| ExactProb::new(s.clone()).to_f64()),
                min_slack_exact: exact,
                at,
            }
        })
        .collect();
    Ok(DominanceReport {
        passed,
        horizon,
        backend: Backend::Exact,
        checks,
        components,
    })
}

/// Log-domain dominance check; a slack below `1 - 1e-12` fails.
pub fn dominance_check_float_with<F>(
    xi: F,
    weighted: &[(BigRational, &dyn PredictiveModel)],
    alphabet: Alphabet,
    horizon: usize,
) -> Result<DominanceReport>
where
    F: Fn(&[u8]) -> Result<LogProb>,
{
    let log_weights: Vec<LogProb> = weighted
        .iter()
        .map(|(w, _)| ExactProb::new(w.clone()).to_log())
        .collect();
    let mut best: Vec<(f64, Seq)> = vec![(f64::INFINITY, Seq::empty()); weighted.len()];
    let mut checks = 0;
    for x in alphabet.strings_up_to(horizon) {
        let xi_x = xi(&x)?;
        for ((slot, (_, model)), lw) in best.iter_mut().zip(weighted).zip(&log_weights) {
            let nu = joint(*model, &x)?;
            checks += 1;
            if nu.is_zero() {
                continue;
            }
            let log_slack = xi_x.ln() - lw.ln() - nu.ln();
            if log_slack < slot.0 {
                *slot = (log_slack, x.clone());
            }
        }
    }
    let passed = best.iter().all(|(s, _)| *s >= -EXACT_IDENTITY_TOL);
    let components = weighted
        .iter()
        .zip(best)
        .map(|((_, model), (log_slack, at))| ComponentSlack {
            name: model.name().to_string(),
            min_slack: log_slack.exp(),
            min_slack_exact: None,
            at,
        })
        .collect();
    Ok(DominanceReport {
        passed,
        horizon,
        backend: Backend::Float,
        checks,
        components,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_traits::One;

    use super::*;
    use crate::measure::{ratio, BernoulliModel, ParamClass};
    use crate::mixture::WeightChoice;

    fn b(p: i64, q: i64) -> Arc<dyn PredictiveModel> {
        Arc::new(BernoulliModel::from_ratio(p, q).unwrap())
    }

    #[test]
    fn singleton_attains_slack_one() {
        let m = Mixture::new(vec![(ratio(1, 1), b(1, 3))]).unwrap();
        for backend in [Backend::Exact, Backend::Float] {
            let r = dominance_check(&m, 8, backend).unwrap();
            assert!(r.passed);
            assert!((r.min_slack() - 1.0).abs() < 1e-12);
        }
        let r = dominance_check(&m, 8, Backend::Exact).unwrap();
        assert_eq!(r.components[0].min_slack_exact, Some(BigRational::one()));
    }

    #[test]
    fn slack_at_all_ones() {
        // ξ(1111) / (½ · 1/16) = 1 + (1/256)/(1/16) = 17/16
        let m = Mixture::new(vec![(ratio(1, 2), b(1, 4)), (ratio(1, 2), b(1, 2))]).unwrap();
        let xi = m.mix_joint_exact(&[1, 1, 1, 1]).unwrap();
        let bound = &ExactProb::from_ratio(1, 2) * &ExactProb::from_ratio(1, 16);
        assert_eq!(&xi / &bound, ExactProb::from_ratio(17, 16));
        assert!(dominance_check(&m, 8, Backend::Exact).unwrap().passed);
    }

    #[test]
    fn inflated_weights_fail() {
        // Weights doubled after the fact while ξ keeps the original weights.
        let m = Mixture::from_class(&ParamClass::dense(3).unwrap(), &WeightChoice::Uniform).unwrap();
        let inflated: Vec<(BigRational, &dyn PredictiveModel)> = m
            .components()
            .iter()
            .map(|c| (c.weight() * ratio(2, 1), c.model()))
            .collect();
        let r = dominance_check_exact_with(|x| m.mix_joint_exact(x), &inflated, m.alphabet(), 6).unwrap();
        assert!(!r.passed);
        let r = dominance_check_float_with(|x| m.mix_joint(x), &inflated, m.alphabet(), 6).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn exact_backend_respects_oracle_horizon() {
        let m = Mixture::new(vec![(ratio(1, 1), b(1, 2))]).unwrap();
        assert!(matches!(
            dominance_check(&m, 21, Backend::Exact),
            Err(Error::OracleHorizonExceeded { .. })
        ));
    }
}
