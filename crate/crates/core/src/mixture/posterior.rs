use super::Mixture;
use crate::error::{Error, Result};
use crate::measure::{LogProb, Seq};

/// Posterior over the components of a mixture, updated one symbol at a time.
///
/// Holds `ln ν(x_{<t})` per component and refreshes them from scratch every
/// time the history length reaches a power of two, recording the largest
/// drift seen between the incremental and recomputed values. A component
/// that assigns zero probability to the history keeps weight zero forever.
#[derive(Clone)]
pub struct PosteriorState<'m> {
    mixture: &'m Mixture,
    history: Seq,
    log_joints: Vec<LogProb>,
    next_check: usize,
    max_drift: f64,
}

impl<'m> PosteriorState<'m> {
    pub fn new(mixture: &'m Mixture) -> Self {
        PosteriorState {
            mixture,
            history: Seq::empty(),
            log_joints: vec![LogProb::ONE; mixture.len()],
            next_check: 1,
            max_drift: 0.0,
        }
    }

    pub fn from_history(mixture: &'m Mixture, history: &[u8]) -> Result<Self> {
        mixture.alphabet().validate(history)?;
        let mut state = Self::new(mixture);
        for &s in history {
            state.observe(s)?;
        }
        Ok(state)
    }

    pub fn mixture(&self) -> &'m Mixture {
        self.mixture
    }

    pub fn history(&self) -> &Seq {
        &self.history
    }

    /// `ln ν(history)` for each component.
    pub fn component_log_joints(&self) -> &[LogProb] {
        &self.log_joints
    }

    /// Largest `|incremental - recomputed|` in log space over all refreshes.
    pub fn max_drift(&self) -> f64 {
        self.max_drift
    }

    /// `ξ(history)`.
    pub fn evidence(&self) -> LogProb {
        LogProb::sum(
            self.mixture
                .components()
                .iter()
                .zip(&self.log_joints)
                .map(|(c, &lj)| c.log_weight() * lj),
        )
    }

    /// Posterior weights `w_ν ν(h) / ξ(h)` in the log domain.
    pub fn log_weights(&self) -> Result<Vec<LogProb>> {
        let evidence = self.evidence();
        if evidence.is_zero() {
            return Err(Error::UndefinedConditional("mixture".into()));
        }
        Ok(self
            .mixture
            .components()
            .iter()
            .zip(&self.log_joints)
            .map(|(c, &lj)| (c.log_weight() * lj) / evidence)
            .collect())
    }

    pub fn weights(&self) -> Result<Vec<f64>> {
        Ok(self.log_weights()?.into_iter().map(LogProb::prob).collect())
    }

    /// `ξ(symbol | history) = Σ_ν posterior(ν) ν(symbol | history)`.
    pub fn predictive(&self, symbol: u8) -> Result<LogProb> {
        let weights = self.log_weights()?;
        let mut terms = Vec::with_capacity(weights.len());
        for (c, w) in self.mixture.components().iter().zip(weights) {
            if w.is_zero() {
                continue;
            }
            terms.push(w * c.model().conditional(&self.history, symbol)?);
        }
        Ok(LogProb::sum(terms))
    }

    /// Predictive distribution over the whole alphabet.
    pub fn predictive_distribution(&self) -> Result<Vec<LogProb>> {
        self.mixture
            .alphabet()
            .symbols()
            .map(|a| self.predictive(a))
            .collect()
    }

    /// Appends `symbol`, multiplying each component joint by its conditional.
    pub fn observe(&mut self, symbol: u8) -> Result<()> {
        if symbol as usize >= self.mixture.alphabet().size() {
            return Err(Error::SymbolOutOfAlphabet {
                symbol,
                position: self.history.len(),
                alphabet_size: self.mixture.alphabet().size(),
            });
        }
        for (c, lj) in self.mixture.components().iter().zip(self.log_joints.iter_mut()) {
            if lj.is_zero() {
                continue;
            }
            *lj = *lj * c.model().conditional(&self.history, symbol)?;
        }
        self.history.push(symbol);
        if self.history.len() == self.next_check {
            self.refresh()?;
            self.next_check *= 2;
        }
        Ok(())
    }

    fn refresh(&mut self) -> Result<()> {
        for (c, lj) in self.mixture.components().iter().zip(self.log_joints.iter_mut()) {
            let fresh = c.model().joint(&self.history)?;
            let drift = match (lj.is_zero(), fresh.is_zero()) {
                (true, true) => 0.0,
                (false, false) => (lj.ln() - fresh.ln()).abs(),
                _ => f64::INFINITY,
            };
            self.max_drift = self.max_drift.max(drift);
            *lj = fresh;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::measure::{ratio, BernoulliModel, ParamClass, PredictiveModel, VanishingPairModel};
    use crate::mixture::WeightChoice;

    fn b(p: i64, q: i64) -> Arc<dyn PredictiveModel> {
        Arc::new(BernoulliModel::from_ratio(p, q).unwrap())
    }

    #[test]
    fn posterior_after_one() {
        let m = Mixture::new(vec![(ratio(1, 2), b(1, 4)), (ratio(1, 2), b(1, 2))]).unwrap();
        let w = m.posterior_weights(&[1]).unwrap().weights().unwrap();
        assert!((w[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((w[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_and_symmetric_pairs() {
        let s = Mixture::new(vec![(ratio(1, 1), b(2, 7))]).unwrap();
        assert_eq!(s.posterior_weights(&[0, 1, 1]).unwrap().weights().unwrap(), vec![1.0]);

        // Same conditionals under two names.
        let twin = Mixture::new(vec![
            (ratio(1, 2), Arc::new(VanishingPairModel::new(3)) as Arc<dyn PredictiveModel>),
            (ratio(1, 2), Arc::new(Renamed(VanishingPairModel::new(3)))),
        ])
        .unwrap();
        let w = twin.posterior_weights(&[0, 0, 1, 0]).unwrap().weights().unwrap();
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
    }

    struct Renamed(VanishingPairModel);

    impl PredictiveModel for Renamed {
        fn name(&self) -> &str {
            "twin"
        }
        fn kind(&self) -> crate::measure::MeasureKind {
            self.0.kind()
        }
        fn conditional(&self, h: &[u8], a: u8) -> Result<LogProb> {
            self.0.conditional(h, a)
        }
    }

    #[test]
    fn zero_probability_component_stays_dead() {
        let m = Mixture::new(vec![(ratio(1, 2), b(0, 1)), (ratio(1, 2), b(1, 2))]).unwrap();
        let mut st = PosteriorState::new(&m);
        st.observe(1).unwrap();
        for _ in 0..40 {
            st.observe(0).unwrap();
        }
        let w = st.weights().unwrap();
        assert_eq!(w[0], 0.0);
        assert!((w[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn incremental_matches_recompute_over_long_runs() {
        let class = ParamClass::dense(8).unwrap();
        let m = Mixture::from_class(&class, &WeightChoice::Surrogate).unwrap();
        let mut st = PosteriorState::new(&m);
        for t in 0..5000u32 {
            st.observe(((t * 7919) % 3 == 0) as u8).unwrap();
        }
        assert!(st.max_drift() < 1e-9, "drift {}", st.max_drift());
        let total: f64 = st.weights().unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}
