use rayon::prelude::*;

use super::{conditional_distribution, hellinger_sq, ratio_term, require_component, squared_diff};
use crate::error::{Error, Result};
use crate::measure::{LogProb, PredictiveModel};
use crate::mixture::{Mixture, PosteriorState};
use crate::rng::{draw_symbol, path_rng};

/// Exhaustive enumeration refuses more than this many length-`n` paths.
pub const MAX_EXACT_PATHS: usize = 1 << 24;

/// Paths simulated per parallel batch; results are reduced in index order.
const MC_BATCH: usize = 256;

/// The per-step quantity whose μ-expected sum is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// `Σ_a (√ξ(a|h) - √μ(a|h))²`.
    Hellinger,
    /// `Σ_a (ξ(a|h) - μ(a|h))²`.
    SquaredDiff,
    /// `Σ_a μ(a|h) (√(ξ(a|h)/μ(a|h)) - 1)²`.
    Ratio,
}

impl Functional {
    fn eval(self, xi: &[f64], mu: &[f64]) -> f64 {
        match self {
            Functional::Hellinger => hellinger_sq(xi, mu),
            Functional::SquaredDiff => squared_diff(xi, mu),
            Functional::Ratio => ratio_term(xi, mu),
        }
    }

    /// The envelope that applies to this functional.
    pub fn envelope(self) -> Envelope {
        match self {
            Functional::Hellinger | Functional::Ratio => Envelope::LogInverseWeight,
            Functional::SquaredDiff => Envelope::DerivedSquared,
        }
    }
}

/// Upper bound for the expected sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Envelope {
    /// `ln(1/w_μ)`.
    LogInverseWeight,
    /// `4 ln(1/w_μ)`: a derived envelope, not a sharp constant.
    DerivedSquared,
}

impl Envelope {
    pub fn value(self, log_inverse_weight: f64) -> f64 {
        match self {
            Envelope::LogInverseWeight => log_inverse_weight,
            Envelope::DerivedSquared => 4.0 * log_inverse_weight,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Envelope::LogInverseWeight => "ln(1/w_mu)",
            Envelope::DerivedSquared => "4 ln(1/w_mu) (derived envelope)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo { seed: u64, samples: usize },
}

/// A μ-expectation of `Σ_{t ≤ horizon} f(x_{<t})` for a mixture and a true
/// measure that is one of its components.
#[derive(Clone, Copy)]
pub struct ExpectationJob<'a> {
    pub mixture: &'a Mixture,
    pub truth: &'a dyn PredictiveModel,
    pub functional: Functional,
    pub horizon: usize,
    pub mode: Mode,
}

impl<'a> ExpectationJob<'a> {
    pub fn new(mixture: &'a Mixture, truth: &'a dyn PredictiveModel, horizon: usize) -> Self {
        ExpectationJob {
            mixture,
            truth,
            functional: Functional::Hellinger,
            horizon,
            mode: Mode::Exact,
        }
    }

    pub fn functional(mut self, functional: Functional) -> Self {
        self.functional = functional;
        self
    }

    pub fn monte_carlo(mut self, seed: u64, samples: usize) -> Self {
        self.mode = Mode::MonteCarlo { seed, samples };
        self
    }

    pub fn bound(&self) -> Result<f64> {
        Ok(self
            .functional
            .envelope()
            .value(require_component(self.mixture, self.truth)?))
    }

    fn check_exact_size(&self) -> Result<()> {
        let a = self.mixture.alphabet().size();
        let too_large = || Error::EnumerationTooLarge {
            alphabet_size: a,
            horizon: self.horizon,
        };
        let paths = a.checked_pow(self.horizon as u32).ok_or_else(too_large)?;
        if paths > MAX_EXACT_PATHS {
            return Err(too_large());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExpectationResult {
    /// `Σ_t E[f(x_{<t})]`.
    pub value: f64,
    pub bound: f64,
    pub envelope: Envelope,
    /// `E[f(x_{<t})]` for `t = 1..=horizon`.
    pub per_step: Vec<f64>,
    pub within_bound: bool,
}

impl ExpectationResult {
    pub fn cumulative(&self) -> Vec<f64> {
        cumulative(&self.per_step)
    }
}

pub(crate) fn cumulative(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Exact `Σ_{t=1..n} Σ'_{x_{<t}} μ(x_{<t}) f(x_{<t})` by enumerating every
/// history with positive μ-probability.
pub fn exact_expected_sum(job: &ExpectationJob<'_>) -> Result<ExpectationResult> {
    job.check_exact_size()?;
    let bound = job.bound()?;
    let n = job.horizon;
    let mut per_step = vec![0.0; n];
    if n > 0 {
        let mut root = PosteriorState::new(job.mixture);
        enumerate(job, &mut root, LogProb::ONE, &mut per_step)?;
    }
    let value: f64 = per_step.iter().sum();
    Ok(ExpectationResult {
        value,
        bound,
        envelope: job.functional.envelope(),
        per_step,
        within_bound: value <= bound + 1e-9,
    })
}

/// Exact expected sum of squared differences with the `4 ln(1/w_μ)` envelope.
pub fn squared_diff_sum(job: &ExpectationJob<'_>) -> Result<ExpectationResult> {
    exact_expected_sum(&job.functional(Functional::SquaredDiff))
}

fn enumerate(
    job: &ExpectationJob<'_>,
    state: &mut PosteriorState<'_>,
    log_mu: LogProb,
    per_step: &mut [f64],
) -> Result<()> {
    let t = state.history().len();
    let xi: Vec<f64> = state
        .predictive_distribution()?
        .into_iter()
        .map(LogProb::prob)
        .collect();
    let mu_log: Vec<LogProb> = job
        .mixture
        .alphabet()
        .symbols()
        .map(|a| job.truth.conditional(state.history(), a))
        .collect::<Result<_>>()?;
    let mu: Vec<f64> = mu_log.iter().map(|l| l.prob()).collect();
    per_step[t] += log_mu.prob() * job.functional.eval(&xi, &mu);
    if t + 1 == per_step.len() {
        return Ok(());
    }
    for (a, &m) in mu_log.iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        let mut child = state.clone();
        child.observe(a as u8)?;
        enumerate(job, &mut child, log_mu * m, per_step)?;
    }
    Ok(())
}

/// Monte Carlo estimate of the expected sum.
#[derive(Debug, Clone)]
pub struct McEstimate {
    pub estimate: f64,
    /// Standard error of `estimate` across paths.
    pub stderr: f64,
    pub samples: usize,
    pub bound: f64,
    /// Mean of `f(x_{<t})` over paths, for `t = 1..=horizon`.
    pub per_step_mean: Vec<f64>,
    /// Per path, the largest `f(x_{<t})` over the final tenth of the horizon.
    /// A finite-horizon proxy for convergence with probability one.
    pub last_window_max: Vec<f64>,
}

impl McEstimate {
    /// Fraction of paths whose last-window maximum is below `eps`.
    pub fn converged_fraction(&self, eps: f64) -> f64 {
        super::fraction_below(&self.last_window_max, eps)
    }

    /// Mean of `per_step_mean` over the 1-based inclusive step range.
    pub fn window_mean(&self, from: usize, to: usize) -> f64 {
        let slice = &self.per_step_mean[from - 1..to];
        slice.iter().sum::<f64>() / slice.len() as f64
    }
}

struct PathResult {
    total: f64,
    terms: Vec<f64>,
    window_max: f64,
}

/// Samples `samples` paths from μ; path `i` draws from stream `i` of `seed`.
/// The reduction runs in index order, so the result does not depend on the
/// thread count.
pub fn mc_expected_sum(job: &ExpectationJob<'_>) -> Result<McEstimate> {
    let Mode::MonteCarlo { seed, samples } = job.mode else {
        return Err(Error::InvalidParameter("job is not in Monte Carlo mode".into()));
    };
    if samples < 2 {
        return Err(Error::InvalidParameter("Monte Carlo needs at least 2 samples".into()));
    }
    let bound = job.bound()?;
    let n = job.horizon;
    let mut per_step_sum = vec![0.0; n];
    let mut totals = Vec::with_capacity(samples);
    let mut last_window_max = Vec::with_capacity(samples);
    for start in (0..samples).step_by(MC_BATCH) {
        let end = (start + MC_BATCH).min(samples);
        let batch: Vec<PathResult> = (start..end)
            .into_par_iter()
            .map(|i| simulate_path(job, seed, i as u64))
            .collect::<Result<_>>()?;
        for path in batch {
            for (acc, v) in per_step_sum.iter_mut().zip(&path.terms) {
                *acc += v;
            }
            totals.push(path.total);
            last_window_max.push(path.window_max);
        }
    }
    let m = samples as f64;
    let estimate = totals.iter().sum::<f64>() / m;
    let var = totals.iter().map(|v| (v - estimate).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(McEstimate {
        estimate,
        stderr: (var / m).sqrt(),
        samples,
        bound,
        per_step_mean: per_step_sum.into_iter().map(|s| s / m).collect(),
        last_window_max,
    })
}

fn simulate_path(job: &ExpectationJob<'_>, seed: u64, index: u64) -> Result<PathResult> {
    let mut rng = path_rng(seed, index);
    let mut state = PosteriorState::new(job.mixture);
    let n = job.horizon;
    let window_start = n - n / 10;
    let mut terms = Vec::with_capacity(n);
    let mut window_max = 0.0f64;
    for t in 0..n {
        let xi: Vec<f64> = state
            .predictive_distribution()?
            .into_iter()
            .map(LogProb::prob)
            .collect();
        let mu = conditional_distribution(job.truth, state.history())?;
        let term = job.functional.eval(&xi, &mu);
        if t >= window_start {
            window_max = window_max.max(term);
        }
        terms.push(term);
        if t + 1 < n {
            state.observe(draw_symbol(&mu, &mut rng))?;
        }
    }
    Ok(PathResult {
        total: terms.iter().sum(),
        terms,
        window_max,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::measure::{ratio, BernoulliModel};

    fn pair() -> (Mixture, Arc<dyn PredictiveModel>) {
        let half: Arc<dyn PredictiveModel> = Arc::new(BernoulliModel::from_ratio(1, 2).unwrap());
        let quarter: Arc<dyn PredictiveModel> = Arc::new(BernoulliModel::from_ratio(1, 4).unwrap());
        let mix = Mixture::new(vec![(ratio(1, 2), quarter), (ratio(1, 2), half.clone())]).unwrap();
        (mix, half)
    }

    #[test]
    fn singleton_sums_vanish() {
        let half: Arc<dyn PredictiveModel> = Arc::new(BernoulliModel::from_ratio(1, 2).unwrap());
        let mix = Mixture::new(vec![(ratio(1, 1), half.clone())]).unwrap();
        let job = ExpectationJob::new(&mix, half.as_ref(), 6);
        let r = exact_expected_sum(&job).unwrap();
        assert_eq!((r.value, r.bound), (0.0, 0.0));
        assert!(r.within_bound);
        let sq = squared_diff_sum(&job).unwrap();
        assert_eq!((sq.value, sq.bound), (0.0, 0.0));
        let mc = mc_expected_sum(&job.monte_carlo(3, 16)).unwrap();
        assert_eq!((mc.estimate, mc.stderr), (0.0, 0.0));
    }

    #[test]
    fn single_step_matches_hellinger_term() {
        let (mix, half) = pair();
        let r = exact_expected_sum(&ExpectationJob::new(&mix, half.as_ref(), 1)).unwrap();
        let expected = hellinger_sq(&[0.625, 0.375], &[0.5, 0.5]);
        assert!((r.value - expected).abs() < 1e-15);
        let sq = squared_diff_sum(&ExpectationJob::new(&mix, half.as_ref(), 1)).unwrap();
        assert!((sq.value - 1.0 / 32.0).abs() < 1e-15);
        assert_eq!(sq.envelope, Envelope::DerivedSquared);
        assert!((sq.bound - 4.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn refuses_oversized_enumeration() {
        let (mix, half) = pair();
        assert!(matches!(
            exact_expected_sum(&ExpectationJob::new(&mix, half.as_ref(), 25)),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn truth_must_be_a_component() {
        let (mix, _) = pair();
        let other = BernoulliModel::from_ratio(1, 3).unwrap();
        assert!(matches!(
            exact_expected_sum(&ExpectationJob::new(&mix, &other, 3)),
            Err(Error::NotAComponent(_))
        ));
    }

    #[test]
    fn monte_carlo_needs_two_samples() {
        let (mix, half) = pair();
        let job = ExpectationJob::new(&mix, half.as_ref(), 3).monte_carlo(1, 1);
        assert!(mc_expected_sum(&job).is_err());
        assert!(mc_expected_sum(&ExpectationJob::new(&mix, half.as_ref(), 3)).is_err());
    }

    #[test]
    fn monte_carlo_prefix_of_streams_is_stable() {
        let (mix, half) = pair();
        let small = mc_expected_sum(&ExpectationJob::new(&mix, half.as_ref(), 20).monte_carlo(9, 300)).unwrap();
        let large = mc_expected_sum(&ExpectationJob::new(&mix, half.as_ref(), 20).monte_carlo(9, 600)).unwrap();
        assert!((small.estimate - large.estimate).abs() <= 3.0 * small.stderr.max(large.stderr));
    }
}
