use super::{conditional_distribution, hellinger_sq, require_component};
use crate::error::Result;
use crate::measure::{LogProb, PredictiveModel};
use crate::mixture::{Mixture, PosteriorState};

/// What happened at one step of a traced sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// 1-based position of the observed symbol.
    pub t: usize,
    pub symbol: u8,
    /// `ξ(x_t | x_{<t})`.
    pub xi: f64,
    /// `μ(x_t | x_{<t})`.
    pub mu: f64,
    /// Hellinger term at `x_{<t}`, over the whole alphabet.
    pub hellinger: f64,
    /// `ln ξ(x_{1:t}) - ln μ(x_{1:t})`; `+∞` once μ assigns zero.
    pub log_deficiency: f64,
}

impl StepRecord {
    /// `ξ(x_t|x_{<t}) / μ(x_t|x_{<t})`.
    pub fn ratio(&self) -> f64 {
        self.xi / self.mu
    }

    /// `(√(ξ/μ) - 1)²` along the observed symbol.
    pub fn ratio_term(&self) -> f64 {
        (self.ratio().sqrt() - 1.0).powi(2)
    }
}

/// Follows one sequence symbol by symbol, tracking ξ and μ side by side.
pub struct PathTracer<'a> {
    state: PosteriorState<'a>,
    truth: &'a dyn PredictiveModel,
    log_mu: LogProb,
}

impl<'a> PathTracer<'a> {
    pub fn new(mixture: &'a Mixture, truth: &'a dyn PredictiveModel) -> Self {
        PathTracer {
            state: PosteriorState::new(mixture),
            truth,
            log_mu: LogProb::ONE,
        }
    }

    pub fn len(&self) -> usize {
        self.state.history().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn posterior(&self) -> &PosteriorState<'a> {
        &self.state
    }

    /// `ξ(symbol | history)`.
    pub fn predictive(&self, symbol: u8) -> Result<f64> {
        Ok(self.state.predictive(symbol)?.prob())
    }

    pub fn step(&mut self, symbol: u8) -> Result<StepRecord> {
        let history = self.state.history().clone();
        let xi_dist: Vec<f64> = self
            .state
            .predictive_distribution()?
            .into_iter()
            .map(LogProb::prob)
            .collect();
        let mu_dist = conditional_distribution(self.truth, &history)?;
        let hellinger = hellinger_sq(&xi_dist, &mu_dist);
        let mu_cond = self.truth.conditional(&history, symbol)?;
        let xi = xi_dist
            .get(symbol as usize)
            .copied()
            .unwrap_or(0.0);
        self.state.observe(symbol)?;
        self.log_mu = self.log_mu * mu_cond;
        let log_deficiency = if self.log_mu.is_zero() {
            f64::INFINITY
        } else {
            self.state.evidence().ln() - self.log_mu.ln()
        };
        Ok(StepRecord {
            t: history.len() + 1,
            symbol,
            xi,
            mu: mu_cond.prob(),
            hellinger,
            log_deficiency,
        })
    }
}

/// `ln ξ(x_{1:m}) - ln μ(x_{1:m})` for `m = 1..=n` and its running supremum.
#[derive(Debug, Clone)]
pub struct DeficiencyTrace {
    pub log_ratios: Vec<f64>,
    pub running_sup: Vec<f64>,
    /// First position where μ assigns probability zero; the trace stops there.
    pub truncated_at: Option<usize>,
}

impl DeficiencyTrace {
    /// Builds the running supremum for `ln ξ(x_{1:m}) - ln μ(x_{1:m})`,
    /// `m = 1..=log_ratios.len()`.
    pub fn from_log_ratios(log_ratios: Vec<f64>, truncated_at: Option<usize>) -> Self {
        let running_sup = log_ratios
            .iter()
            .scan(0.0f64, |sup, &r| {
                *sup = sup.max(r);
                Some(*sup)
            })
            .collect();
        DeficiencyTrace {
            log_ratios,
            running_sup,
            truncated_at,
        }
    }

    /// Supremum over the traced prefixes, including the empty one (value 0).
    pub fn sup(&self) -> f64 {
        if self.truncated_at.is_some() {
            return f64::INFINITY;
        }
        self.running_sup.last().copied().unwrap_or(0.0).max(0.0)
    }

    /// `ξ(x_{1:m}) ≤ c μ(x_{1:m})` for every traced prefix.
    pub fn is_random_at_level(&self, c: f64) -> bool {
        self.sup() <= c.ln()
    }

    /// Smallest `c` with `is_random_at_level(c)`.
    pub fn level(&self) -> f64 {
        self.sup().exp()
    }

    /// Whether the running supremum increases over the last `window` entries.
    pub fn still_growing(&self, window: usize) -> bool {
        let n = self.running_sup.len();
        if n <= window {
            return true;
        }
        self.running_sup[n - 1] > self.running_sup[n - 1 - window]
    }
}

pub fn deficiency_trace(
    mixture: &Mixture,
    truth: &dyn PredictiveModel,
    seq: &[u8],
) -> Result<DeficiencyTrace> {
    let mut tracer = PathTracer::new(mixture, truth);
    let mut log_ratios = Vec::with_capacity(seq.len());
    let mut truncated_at = None;
    for &s in seq {
        let rec = tracer.step(s)?;
        if rec.log_deficiency.is_infinite() {
            truncated_at = Some(rec.t);
            break;
        }
        log_ratios.push(rec.log_deficiency);
    }
    Ok(DeficiencyTrace::from_log_ratios(log_ratios, truncated_at))
}

/// `ξ(x_t | x_{<t}) / μ(x_t | x_{<t})` along `seq`.
pub fn ratio_trace(mixture: &Mixture, truth: &dyn PredictiveModel, seq: &[u8]) -> Result<Vec<f64>> {
    let mut tracer = PathTracer::new(mixture, truth);
    seq.iter().map(|&s| tracer.step(s).map(|r| r.ratio())).collect()
}

/// Hellinger terms along one sequence, for a truth that is a component.
#[derive(Debug, Clone)]
pub struct HellingerReport {
    pub per_step: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// `ln(1/w_μ)`.
    pub bound: f64,
    /// `(√(ξ(x_t|x_{<t})/μ(x_t|x_{<t})) - 1)²` along the sequence.
    pub on_sequence_ratio_terms: Vec<f64>,
}

impl HellingerReport {
    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

pub fn hellinger_report(
    mixture: &Mixture,
    truth: &dyn PredictiveModel,
    seq: &[u8],
) -> Result<HellingerReport> {
    let bound = require_component(mixture, truth)?;
    let mut tracer = PathTracer::new(mixture, truth);
    let mut per_step = Vec::with_capacity(seq.len());
    let mut ratio_terms = Vec::with_capacity(seq.len());
    for &s in seq {
        let rec = tracer.step(s)?;
        per_step.push(rec.hellinger);
        ratio_terms.push(rec.ratio_term());
    }
    Ok(HellingerReport {
        cumulative: super::expectation::cumulative(&per_step),
        per_step,
        bound,
        on_sequence_ratio_terms: ratio_terms,
    })
}
