use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::machine::{MonotoneMachine, ProgramFamilyMachine};
use super::{lower_approx, Budget, Dyadic};
use crate::error::{Error, Result};
use crate::measure::{Alphabet, ExactProb, LogProb, MeasureKind, PredictiveModel, Seq};

/// `M_{L,T}` as a predictive semimeasure:
/// `conditional(h, a) = M_{L,T}(ha) / M_{L,T}(h)`.
pub struct MachineSemimeasure {
    machine: Arc<dyn MonotoneMachine>,
    budget: Budget,
    name: String,
    cache: Mutex<HashMap<Seq, Dyadic>>,
}

impl std::fmt::Debug for MachineSemimeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MachineSemimeasure")
            .field("name", &self.name)
            .field("budget", &self.budget)
            .finish()
    }
}

impl MachineSemimeasure {
    pub fn new(machine: Arc<dyn MonotoneMachine>, budget: Budget) -> Result<Self> {
        let budget = Budget::new(budget.max_bits, budget.max_steps)?;
        Ok(MachineSemimeasure {
            name: format!("M[L={},T={}]", budget.max_bits, budget.max_steps),
            machine,
            budget,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    /// `M_{L,T}(x)`, memoized.
    pub fn mass(&self, x: &[u8]) -> Result<Dyadic> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(x) {
            return Ok(*v);
        }
        let v = lower_approx(self.machine.as_ref(), self.budget, x)?;
        self.cache.lock().expect("cache lock").insert(Seq::from(x), v);
        Ok(v)
    }

    fn ratio(&self, history: &[u8], symbol: u8) -> Result<(Dyadic, Dyadic)> {
        self.alphabet().validate(&[symbol])?;
        let denom = self.mass(history)?;
        if denom.is_zero() {
            return Err(Error::UndefinedConditional(format!(
                "{} has zero mass on the history",
                self.name
            )));
        }
        let mut ext = history.to_vec();
        ext.push(symbol);
        Ok((self.mass(&ext)?, denom))
    }
}

impl PredictiveModel for MachineSemimeasure {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> MeasureKind {
        MeasureKind::Semimeasure
    }

    fn alphabet(&self) -> Alphabet {
        self.machine.alphabet()
    }

    fn conditional(&self, history: &[u8], symbol: u8) -> Result<LogProb> {
        let (num, den) = self.ratio(history, symbol)?;
        Ok(num.to_log() / den.to_log())
    }

    fn has_exact(&self) -> bool {
        true
    }

    fn conditional_exact(&self, history: &[u8], symbol: u8) -> Result<ExactProb> {
        let (num, den) = self.ratio(history, symbol)?;
        Ok(ExactProb::new(num.to_rational() / den.to_rational()))
    }
}

/// Stage semimeasure for the standard program-family machine.
pub fn machine_semimeasure(max_bits: u32, max_steps: u64) -> Result<MachineSemimeasure> {
    MachineSemimeasure::new(
        Arc::new(ProgramFamilyMachine::default()),
        Budget::new(max_bits, max_steps)?,
    )
}

/// Normalized stage: `conditional(h, a) = M(ha) / Σ_b M(hb)`, a measure.
#[derive(Debug)]
pub struct NormalizedMachine {
    inner: MachineSemimeasure,
    name: String,
}

impl NormalizedMachine {
    pub fn new(inner: MachineSemimeasure) -> Self {
        NormalizedMachine {
            name: format!("norm {}", inner.name()),
            inner,
        }
    }

    fn parts(&self, history: &[u8], symbol: u8) -> Result<(Dyadic, Dyadic)> {
        self.alphabet().validate(&[symbol])?;
        let mut num = Dyadic::ZERO;
        let mut total = Dyadic::ZERO;
        let mut ext = history.to_vec();
        ext.push(0);
        for b in self.alphabet().symbols() {
            *ext.last_mut().expect("nonempty") = b;
            let m = self.inner.mass(&ext)?;
            if b == symbol {
                num = m;
            }
            total = total + m;
        }
        if total.is_zero() {
            return Err(Error::UndefinedNormalization);
        }
        Ok((num, total))
    }
}

impl PredictiveModel for NormalizedMachine {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> MeasureKind {
        MeasureKind::Measure
    }

    fn alphabet(&self) -> Alphabet {
        self.inner.alphabet()
    }

    fn conditional(&self, history: &[u8], symbol: u8) -> Result<LogProb> {
        let (num, total) = self.parts(history, symbol)?;
        Ok(num.to_log() / total.to_log())
    }

    fn has_exact(&self) -> bool {
        true
    }

    fn conditional_exact(&self, history: &[u8], symbol: u8) -> Result<ExactProb> {
        let (num, total) = self.parts(history, symbol)?;
        Ok(ExactProb::new(num.to_rational() / total.to_rational()))
    }
}

/// Normalized stage for the standard program-family machine.
pub fn normalize_machine(max_bits: u32, max_steps: u64) -> Result<NormalizedMachine> {
    Ok(NormalizedMachine::new(machine_semimeasure(max_bits, max_steps)?))
}
