//! Convergence and randomness statistics for a mixture `ξ` against a true
//! measure `μ`.
//!
//! * Hellinger terms `h_t = Σ_a (√ξ(a|x_{<t}) - √μ(a|x_{<t}))²`, whose
//!   μ-expected sum over `t` is bounded by `ln(1/w_μ)`.
//! * The ratio form `E(√(ξ(x_t|x_{<t}) / μ(x_t|x_{<t})) - 1)²`, bounded by the
//!   same constant.
//! * Squared differences `Σ_a (ξ(a|x_{<t}) - μ(a|x_{<t}))²`, bounded by
//!   `4 ln(1/w_μ)` since `(a - b)² ≤ 4 (√a - √b)²` on `[0, 1]`.
//! * Deficiency traces `ln ξ(x_{1:m}) - ln μ(x_{1:m})`, whose supremum decides
//!   μ/ξ-randomness of an individual sequence.

mod expectation;
mod traces;

pub use expectation::{
    exact_expected_sum, mc_expected_sum, squared_diff_sum, Envelope, ExpectationJob,
    ExpectationResult, Functional, McEstimate, Mode, MAX_EXACT_PATHS,
};
pub use traces::{
    deficiency_trace, hellinger_report, ratio_trace, DeficiencyTrace, HellingerReport, PathTracer,
    StepRecord,
};

use crate::error::{Error, Result};
use crate::measure::PredictiveModel;
use crate::mixture::Mixture;

/// `Σ_a (√p_a - √q_a)²` for two distributions over the same alphabet.
pub fn hellinger_sq(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2))
        .sum()
}

/// `Σ_a (p_a - q_a)²`.
pub fn squared_diff(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum()
}

/// `Σ_{a: q_a > 0} q_a (√(p_a / q_a) - 1)²`: the μ-expectation, over the
/// next symbol, of the on-sequence ratio term.
pub fn ratio_term(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(_, &b)| b > 0.0)
        .map(|(a, b)| b * ((a / b).sqrt() - 1.0).powi(2))
        .sum()
}

/// Hellinger term between `ξ(·|history)` and `μ(·|history)`.
pub fn hellinger_term(mix: &Mixture, model: &dyn PredictiveModel, history: &[u8]) -> Result<f64> {
    let xi = mix.posterior_weights(history)?.predictive_distribution()?;
    let xi: Vec<f64> = xi.into_iter().map(|l| l.prob()).collect();
    let mu = conditional_distribution(model, history)?;
    Ok(hellinger_sq(&xi, &mu))
}

/// `μ(·|history)` as linear probabilities.
pub fn conditional_distribution(model: &dyn PredictiveModel, history: &[u8]) -> Result<Vec<f64>> {
    model
        .alphabet()
        .symbols()
        .map(|a| model.conditional(history, a).map(|l| l.prob()))
        .collect()
}

pub(crate) fn require_component(mix: &Mixture, model: &dyn PredictiveModel) -> Result<f64> {
    mix.log_inverse_weight(model.name())
        .map_err(|_| Error::NotAComponent(model.name().to_string()))
}

/// Fraction of `values` strictly below `eps`.
pub fn fraction_below(values: &[f64], eps: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().filter(|&&v| v < eps).count() as f64 / values.len() as f64
}
