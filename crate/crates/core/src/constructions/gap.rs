use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::diagnostics::DeficiencyTrace;
use crate::error::{Error, Result};
use crate::measure::{BernoulliModel, ParamClass, Seq};
use crate::mixture::{Mixture, PosteriorState, WeightChoice};

/// Greedy sequence that keeps `S_t = ln μ_{θ1}(x_{1:t}) - ln μ_{θ0}(x_{1:t})`
/// as close to zero as possible.
///
/// Each symbol moves `S` by `inc1 = ln(θ1/θ0) > 0` or by
/// `inc0 = ln((1-θ1)/(1-θ0)) < 0`; the builder picks whichever lands nearer
/// to zero, preferring 0 on ties.
#[derive(Debug, Clone)]
pub struct GapSequenceBuilder {
    theta0: BigRational,
    theta1: BigRational,
    inc0: f64,
    inc1: f64,
    state: f64,
    len: usize,
    ones: usize,
    max_abs_state: f64,
}

impl GapSequenceBuilder {
    pub fn new(theta0: BigRational, theta1: BigRational) -> Result<Self> {
        if theta0 == theta1 {
            return Err(Error::InvalidParameter(format!("degenerate gap θ0 = θ1 = {theta0}")));
        }
        if !(BigRational::zero() < theta0 && theta0 < theta1 && theta1 < BigRational::one()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < θ0 < θ1 < 1, got {theta0}, {theta1}"
            )));
        }
        let t0 = theta0.to_f64().unwrap_or(f64::NAN);
        let t1 = theta1.to_f64().unwrap_or(f64::NAN);
        Ok(GapSequenceBuilder {
            inc1: t1.ln() - t0.ln(),
            inc0: (-t1).ln_1p() - (-t0).ln_1p(),
            theta0,
            theta1,
            state: 0.0,
            len: 0,
            ones: 0,
            max_abs_state: 0.0,
        })
    }

    pub fn theta0(&self) -> &BigRational {
        &self.theta0
    }

    pub fn theta1(&self) -> &BigRational {
        &self.theta1
    }

    pub fn inc0(&self) -> f64 {
        self.inc0
    }

    pub fn inc1(&self) -> f64 {
        self.inc1
    }

    /// `max(inc1, -inc0)`, which `|S_t|` never exceeds.
    pub fn bound(&self) -> f64 {
        self.inc1.max(-self.inc0)
    }

    /// The ones-frequency `p* = -inc0 / (inc1 - inc0)` at which both
    /// endpoints have the same asymptotic log-likelihood.
    pub fn balance_frequency(&self) -> f64 {
        -self.inc0 / (self.inc1 - self.inc0)
    }

    /// Current `S_t`.
    pub fn state(&self) -> f64 {
        self.state
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ones(&self) -> usize {
        self.ones
    }

    pub fn max_abs_state(&self) -> f64 {
        self.max_abs_state
    }

    pub fn next_symbol(&mut self) -> u8 {
        let with_one = self.state + self.inc1;
        let with_zero = self.state + self.inc0;
        let symbol = if with_one.abs() < with_zero.abs() { 1 } else { 0 };
        self.state = if symbol == 1 { with_one } else { with_zero };
        self.len += 1;
        self.ones += symbol as usize;
        self.max_abs_state = self.max_abs_state.max(self.state.abs());
        symbol
    }
}

impl Iterator for GapSequenceBuilder {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        Some(self.next_symbol())
    }
}

/// The first `n` symbols of the greedy balancing sequence.
pub fn greedy_gap_sequence(theta0: BigRational, theta1: BigRational, n: usize) -> Result<Seq> {
    Ok(Seq::new(GapSequenceBuilder::new(theta0, theta1)?.take(n).collect()))
}

/// Outcome of running a gapped-class mixture on the greedy sequence.
#[derive(Debug, Clone)]
pub struct GapReport {
    pub theta0: BigRational,
    pub theta1: BigRational,
    pub sequence: Seq,
    /// `S_t` for `t = 1..=n`.
    pub states: Vec<f64>,
    pub max_abs_state: f64,
    /// `max(inc1, -inc0)`.
    pub state_bound: f64,
    /// `ξ(1 | x_{<t})` for `t = 1..=n`.
    pub predictive: Vec<f64>,
    pub deficiency0: DeficiencyTrace,
    pub deficiency1: DeficiencyTrace,
    /// Inclusive 1-based range `[n/10, n]`.
    pub window: (usize, usize),
    pub window_min: f64,
    pub window_max: f64,
    /// `min_t |ξ(1|x_{<t}) - θ0|` over the window.
    pub distance_theta0: f64,
    /// `min_t |ξ(1|x_{<t}) - θ1|` over the window.
    pub distance_theta1: f64,
    pub ones_frequency: f64,
    pub balance_frequency: f64,
}

impl GapReport {
    /// `max - min` of the predictive over the window.
    pub fn window_spread(&self) -> f64 {
        self.window_max - self.window_min
    }

    /// `|ones_frequency - p*| ≤ bound / (n (inc1 - inc0))`, exact for the
    /// greedy rule since `S_n = k inc1 + (n - k) inc0`.
    pub fn frequency_error_bound(&self) -> f64 {
        let b = GapSequenceBuilder::new(self.theta0.clone(), self.theta1.clone())
            .expect("validated endpoints");
        b.bound() / (self.sequence.len() as f64 * (b.inc1() - b.inc0()))
    }
}

/// Runs the Bayes mixture over a gapped class along the greedy sequence for
/// its gap endpoints.
pub fn gap_experiment(class: &ParamClass, weights: &WeightChoice, n: usize) -> Result<GapReport> {
    let (lo, hi) = class
        .gap()
        .ok_or_else(|| Error::InvalidParameter("gap experiment needs a gapped class".into()))?;
    if n == 0 {
        return Err(Error::InvalidParameter("gap experiment needs n ≥ 1".into()));
    }
    let (theta0, theta1) = (lo.clone(), hi.clone());
    let mixture = Mixture::from_class(class, weights)?;
    let mu0 = BernoulliModel::new(theta0.clone())?;
    let mu1 = BernoulliModel::new(theta1.clone())?;
    let mut builder = GapSequenceBuilder::new(theta0.clone(), theta1.clone())?;
    let state_bound = builder.bound();
    let balance_frequency = builder.balance_frequency();

    let mut post = PosteriorState::new(&mixture);
    let mut states = Vec::with_capacity(n);
    let mut predictive = Vec::with_capacity(n);
    let mut def0 = Vec::with_capacity(n);
    let mut def1 = Vec::with_capacity(n);
    for _ in 0..n {
        predictive.push(post.predictive(1)?.prob());
        let x = builder.next_symbol();
        states.push(builder.state());
        post.observe(x)?;
        let (ones, zeros) = (builder.ones(), builder.len() - builder.ones());
        let evidence = post.evidence().ln();
        def0.push(evidence - mu0.log_likelihood(ones, zeros).ln());
        def1.push(evidence - mu1.log_likelihood(ones, zeros).ln());
    }
    let sequence = post.history().clone();

    let window = ((n / 10).max(1), n);
    let in_window = &predictive[window.0 - 1..window.1];
    let t0 = theta0.to_f64().unwrap_or(f64::NAN);
    let t1 = theta1.to_f64().unwrap_or(f64::NAN);
    let min_dist = |theta: f64| in_window.iter().map(|p| (p - theta).abs()).fold(f64::INFINITY, f64::min);
    Ok(GapReport {
        window_min: in_window.iter().copied().fold(f64::INFINITY, f64::min),
        window_max: in_window.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        distance_theta0: min_dist(t0),
        distance_theta1: min_dist(t1),
        window,
        ones_frequency: builder.ones() as f64 / n as f64,
        balance_frequency,
        max_abs_state: builder.max_abs_state(),
        state_bound,
        theta0,
        theta1,
        sequence,
        states,
        predictive,
        deficiency0: DeficiencyTrace::from_log_ratios(def0, None),
        deficiency1: DeficiencyTrace::from_log_ratios(def1, None),
    })
}
