//! Bayes mixtures `ξ(x) = Σ_ν w_ν ν(x)` over finite model classes.
//!
//! A mixture multiplicatively dominates each of its components,
//! `ξ(x) ≥ w_ν ν(x)`, and is itself a semimeasure (a measure when the
//! weights sum to one and every component is a measure). Its conditionals
//! `ξ(a | h) = ξ(h a) / ξ(h)` are the Bayes predictive distribution, equal to
//! the posterior-weighted average of the component conditionals.

mod dominance;
mod posterior;

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coding::gamma_len;
use crate::error::{Error, Result};
use crate::measure::{
    joint, joint_exact, Alphabet, ExactProb, LogProb, MeasureKind, ParamClass, PredictiveModel,
};

pub use dominance::{
    dominance_check, dominance_check_exact_with, dominance_check_float_with, Backend,
    ComponentSlack, DominanceReport,
};
pub use posterior::PosteriorState;

/// Upper limit on the number of components given surrogate weights.
pub const MAX_SURROGATE_COMPONENTS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    Explicit,
    /// `w_i = 2^{-L(i)}`, `L(i)` the Elias-gamma length of `i + 1`.
    SurrogateComplexity,
}

#[derive(Clone)]
pub struct Component {
    weight: BigRational,
    log_weight: LogProb,
    model: Arc<dyn PredictiveModel>,
}

impl Component {
    pub fn weight(&self) -> &BigRational {
        &self.weight
    }

    pub fn log_weight(&self) -> LogProb {
        self.log_weight
    }

    pub fn model(&self) -> &dyn PredictiveModel {
        self.model.as_ref()
    }

    pub fn model_arc(&self) -> &Arc<dyn PredictiveModel> {
        &self.model
    }

    pub fn name(&self) -> &str {
        self.model.name()
    }
}

/// Weighted finite collection of predictive models. Immutable once built.
#[derive(Clone)]
pub struct Mixture {
    components: Vec<Component>,
    scheme: WeightScheme,
    alphabet: Alphabet,
}

impl Mixture {
    /// Builds a mixture from explicit weights. Requires every weight `> 0`,
    /// `Σ w ≤ 1`, unique component names and a shared alphabet.
    pub fn new(parts: Vec<(BigRational, Arc<dyn PredictiveModel>)>) -> Result<Self> {
        Self::with_scheme(parts, WeightScheme::Explicit)
    }

    fn with_scheme(
        parts: Vec<(BigRational, Arc<dyn PredictiveModel>)>,
        scheme: WeightScheme,
    ) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Configuration("empty component list".into()))?;
        let alphabet = first.1.alphabet();
        let mut names = HashSet::new();
        let mut total = BigRational::zero();
        let mut components = Vec::with_capacity(parts.len());
        for (weight, model) in parts {
            if !weight.is_positive() {
                return Err(Error::Configuration(format!(
                    "weight of `{}` must be positive, got {weight}",
                    model.name()
                )));
            }
            if !names.insert(model.name().to_string()) {
                return Err(Error::Configuration(format!(
                    "duplicate component name `{}`",
                    model.name()
                )));
            }
            if model.alphabet() != alphabet {
                return Err(Error::AlphabetMismatch {
                    expected: alphabet.size(),
                    found: model.alphabet().size(),
                });
            }
            total += &weight;
            let log_weight = ExactProb::new(weight.clone()).to_log();
            components.push(Component {
                weight,
                log_weight,
                model,
            });
        }
        if total > BigRational::one() {
            return Err(Error::Configuration(format!("weights sum to {total} > 1")));
        }
        Ok(Mixture {
            components,
            scheme,
            alphabet,
        })
    }

    /// Equal weights `1/n`.
    pub fn uniform(models: Vec<Arc<dyn PredictiveModel>>) -> Result<Self> {
        let n = models.len().max(1);
        let w = BigRational::new(BigInt::one(), BigInt::from(n));
        Self::new(models.into_iter().map(|m| (w.clone(), m)).collect())
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn weight_sum(&self) -> BigRational {
        self.components.iter().map(|c| c.weight.clone()).sum()
    }

    /// A measure iff the weights sum to one and every component is a measure.
    pub fn kind(&self) -> MeasureKind {
        let all_measures = self
            .components
            .iter()
            .all(|c| c.model.kind() == MeasureKind::Measure);
        if all_measures && self.weight_sum().is_one() {
            MeasureKind::Measure
        } else {
            MeasureKind::Semimeasure
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c.name() == name)
    }

    pub fn weight_of(&self, name: &str) -> Result<&BigRational> {
        self.index_of(name)
            .map(|i| &self.components[i].weight)
            .ok_or_else(|| Error::NotAComponent(name.to_string()))
    }

    /// `ξ(x) = Σ_ν w_ν ν(x)` by log-sum-exp.
    pub fn mix_joint(&self, x: &[u8]) -> Result<LogProb> {
        self.alphabet.validate(x)?;
        let terms = self
            .components
            .iter()
            .map(|c| Ok(c.log_weight * c.model.joint(x)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(LogProb::sum(terms))
    }

    /// `ξ(x)` in exact rational arithmetic.
    pub fn mix_joint_exact(&self, x: &[u8]) -> Result<ExactProb> {
        let mut total = ExactProb::zero();
        for c in &self.components {
            let term = &ExactProb::new(c.weight.clone()) * &joint_exact(c.model.as_ref(), x)?;
            total = &total + &term;
        }
        Ok(total)
    }

    /// `ξ(symbol | history) = ξ(history·symbol) / ξ(history)`.
    pub fn predictive(&self, history: &[u8], symbol: u8) -> Result<LogProb> {
        let denom = self.mix_joint(history)?;
        if denom.is_zero() {
            return Err(Error::UndefinedConditional("mixture".into()));
        }
        let mut extended = history.to_vec();
        extended.push(symbol);
        Ok(self.mix_joint(&extended)? / denom)
    }

    /// Posterior over components after observing `history`.
    pub fn posterior_weights(&self, history: &[u8]) -> Result<PosteriorState<'_>> {
        PosteriorState::from_history(self, history)
    }

    /// `ξ(h a) / Σ_b ξ(h b)`: the mixture's predictive renormalized to sum to 1.
    pub fn normalize_predictive(&self, history: &[u8]) -> Result<Vec<f64>> {
        let mut extended = history.to_vec();
        extended.push(0);
        let mut masses = Vec::with_capacity(self.alphabet.size());
        for a in self.alphabet.symbols() {
            *extended.last_mut().unwrap() = a;
            masses.push(self.mix_joint(&extended)?);
        }
        normalize_log_masses(&masses)
    }
}

/// Normalizes log masses into a probability vector.
pub fn normalize_log_masses(masses: &[LogProb]) -> Result<Vec<f64>> {
    let total = LogProb::sum(masses.iter().copied());
    if total.is_zero() {
        return Err(Error::UndefinedNormalization);
    }
    Ok(masses.iter().map(|m| (*m / total).prob()).collect())
}

/// Assigns `w_i = 2^{-L(i)}` in enumeration order, where `L(i)` is the
/// Elias-gamma length of `i + 1`. Kraft's inequality keeps `Σ w ≤ 1`.
pub fn surrogate_weights(models: Vec<Arc<dyn PredictiveModel>>) -> Result<Mixture> {
    if models.len() > MAX_SURROGATE_COMPONENTS {
        return Err(Error::Configuration(format!(
            "{} components exceed the surrogate limit {MAX_SURROGATE_COMPONENTS}",
            models.len()
        )));
    }
    let parts = models
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            let len = gamma_len(i as u64 + 1);
            let w = BigRational::new(BigInt::one(), BigInt::one() << len);
            (w, m)
        })
        .collect();
    Mixture::with_scheme(parts, WeightScheme::SurrogateComplexity)
}

/// How to weight the members of a parameter class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightChoice {
    Uniform,
    Surrogate,
    Explicit(Vec<BigRational>),
}

impl Mixture {
    /// Bernoulli mixture over a parameter class.
    pub fn from_class(class: &ParamClass, weights: &WeightChoice) -> Result<Self> {
        let models = class.models()?;
        match weights {
            WeightChoice::Uniform => Mixture::uniform(models),
            WeightChoice::Surrogate => surrogate_weights(models),
            WeightChoice::Explicit(ws) => {
                if ws.len() != models.len() {
                    return Err(Error::Configuration(format!(
                        "{} weights for {} components",
                        ws.len(),
                        models.len()
                    )));
                }
                Mixture::new(ws.iter().cloned().zip(models).collect())
            }
        }
    }

    /// `ln(1 / w_ν)` for the named component.
    pub fn log_inverse_weight(&self, name: &str) -> Result<f64> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::NotAComponent(name.to_string()))?;
        Ok(-self.components[i].log_weight.ln())
    }
}

/// `ρ(x)` for each component, handy for diagnostics and tests.
pub fn component_joints(mix: &Mixture, x: &[u8]) -> Result<Vec<LogProb>> {
    mix.components()
        .iter()
        .map(|c| joint(c.model(), x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{ratio, BernoulliModel, EXACT_IDENTITY_TOL};

    fn b(p: i64, q: i64) -> Arc<dyn PredictiveModel> {
        Arc::new(BernoulliModel::from_ratio(p, q).unwrap())
    }

    fn pair() -> Mixture {
        Mixture::new(vec![(ratio(1, 2), b(1, 4)), (ratio(1, 2), b(1, 2))]).unwrap()
    }

    #[test]
    fn singleton_degenerates_to_component() {
        let m = Mixture::new(vec![(ratio(1, 1), b(1, 2))]).unwrap();
        assert!((m.mix_joint(&[1, 0]).unwrap().prob() - 0.25).abs() < 1e-15);
        for theta in [(1, 3), (3, 4)] {
            let s = Mixture::new(vec![(ratio(1, 1), b(theta.0, theta.1))]).unwrap();
            let p = s.predictive(&[0, 1, 1], 1).unwrap().prob();
            assert!((p - theta.0 as f64 / theta.1 as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn two_component_values() {
        let m = pair();
        assert_eq!(m.mix_joint_exact(&[1]).unwrap(), ExactProb::from_ratio(3, 8));
        assert!((m.mix_joint(&[1]).unwrap().prob() - 0.375).abs() < 1e-15);
        assert!((m.predictive(&[], 1).unwrap().prob() - 0.375).abs() < 1e-15);
        assert!((m.predictive(&[1], 1).unwrap().prob() - 5.0 / 12.0).abs() < 1e-12);
        assert!((m.mix_joint(&[]).unwrap().prob() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_string_mass_is_weight_sum() {
        let m = Mixture::new(vec![(ratio(1, 4), b(1, 4)), (ratio(1, 8), b(1, 2))]).unwrap();
        assert!((m.mix_joint(&[]).unwrap().prob() - 0.375).abs() < 1e-15);
        assert_eq!(m.kind(), MeasureKind::Semimeasure);
        assert_eq!(pair().kind(), MeasureKind::Measure);
    }

    #[test]
    fn configuration_errors() {
        assert!(matches!(Mixture::new(vec![]), Err(Error::Configuration(_))));
        assert!(Mixture::new(vec![(ratio(3, 4), b(1, 4)), (ratio(1, 2), b(1, 2))]).is_err());
        assert!(Mixture::new(vec![(ratio(0, 1), b(1, 4))]).is_err());
        assert!(Mixture::new(vec![(ratio(1, 4), b(1, 4)), (ratio(1, 4), b(1, 4))]).is_err());
    }

    #[test]
    fn surrogate_weight_table() {
        let one = surrogate_weights(vec![b(1, 2)]).unwrap();
        assert_eq!(one.components()[0].weight(), &ratio(1, 2));
        let three = surrogate_weights(vec![b(1, 2), b(1, 3), b(1, 4)]).unwrap();
        let ws: Vec<_> = three.components().iter().map(|c| c.weight().clone()).collect();
        assert_eq!(ws, [ratio(1, 2), ratio(1, 8), ratio(1, 8)]);
        assert_eq!(three.scheme(), WeightScheme::SurrogateComplexity);
    }

    #[test]
    fn surrogate_weights_satisfy_kraft() {
        let class = ParamClass::dense(30).unwrap();
        let m = Mixture::from_class(&class, &WeightChoice::Surrogate).unwrap();
        assert!(m.weight_sum() <= BigRational::one());
    }

    #[test]
    fn normalize_predictive_cases() {
        let m = pair();
        let n = m.normalize_predictive(&[1]).unwrap();
        let p = m.predictive(&[1], 1).unwrap().prob();
        assert!((n[1] - p).abs() < 1e-12);
        assert!((n.iter().sum::<f64>() - 1.0).abs() < EXACT_IDENTITY_TOL);

        // A semimeasure mixture with symmetric continuations.
        let half = Mixture::new(vec![(ratio(1, 4), b(1, 2))]).unwrap();
        let sym = half.normalize_predictive(&[0, 1]).unwrap();
        assert!(sym.iter().all(|p| (p - 0.5).abs() < EXACT_IDENTITY_TOL));

        let zero = Mixture::new(vec![(ratio(1, 1), b(0, 1))]).unwrap();
        assert!(matches!(
            zero.normalize_predictive(&[1]),
            Err(Error::UndefinedNormalization)
        ));
        assert!(matches!(
            zero.predictive(&[1], 0),
            Err(Error::UndefinedConditional(_))
        ));
    }

    #[test]
    fn permutation_leaves_joint_unchanged() {
        let class = ParamClass::dense(5).unwrap();
        let models = class.models().unwrap();
        let n = models.len() as i64;
        let forward: Vec<_> = models.iter().map(|m| (ratio(1, n), m.clone())).collect();
        let mut backward = forward.clone();
        backward.reverse();
        let f = Mixture::new(forward).unwrap();
        let r = Mixture::new(backward).unwrap();
        for x in Alphabet::BINARY.strings_up_to(8) {
            let a = f.mix_joint(&x).unwrap().prob();
            let c = r.mix_joint(&x).unwrap().prob();
            assert!((a - c).abs() <= EXACT_IDENTITY_TOL * a.max(c));
        }
    }
}
