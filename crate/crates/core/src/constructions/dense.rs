use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;

use super::sample_stream;
use crate::error::{Error, Result};
use crate::measure::{BernoulliModel, ParamClass};
use crate::mixture::{Mixture, PosteriorState, WeightChoice};

#[derive(Debug, Clone)]
pub struct DenseConfig {
    pub class: ParamClass,
    pub weights: WeightChoice,
    pub theta_true: BigRational,
    pub n: usize,
    pub seed: u64,
    /// Number of sample paths; path `i` uses stream `i` of `seed`.
    pub paths: usize,
}

/// Summary of one sampled path.
#[derive(Debug, Clone, PartialEq)]
pub struct DensePath {
    pub stream: u64,
    /// Mean of `|ξ(1|x_{<t}) - θ_true|` over `t ∈ [n/10, n]`.
    pub last_decade_deviation: f64,
    /// `sup_t ln ξ(x_{1:t}) - ln μ(x_{1:t})`.
    pub deficiency_sup: f64,
    pub final_predictive: f64,
}

/// Per-step values along the first path.
#[derive(Debug, Clone)]
pub struct DenseTrace {
    /// `ξ(1 | x_{<t})`.
    pub predictive: Vec<f64>,
    /// `ln ξ(x_{1:t}) - ln μ_{θ_true}(x_{1:t})`.
    pub deficiency_true: Vec<f64>,
    /// Same against the class member closest to `θ_true`, other than itself.
    pub deficiency_nearest: Vec<f64>,
    pub nearest_theta: Option<BigRational>,
}

#[derive(Debug, Clone)]
pub struct DenseReport {
    pub theta_true: BigRational,
    pub in_class: bool,
    /// Set when `θ_true` is not a class member; convergence is then not expected.
    pub warning: Option<String>,
    pub window: (usize, usize),
    pub paths: Vec<DensePath>,
    pub mean_last_decade_deviation: f64,
    pub trace: DenseTrace,
}

impl DenseReport {
    pub fn max_deficiency_sup(&self) -> f64 {
        self.paths.iter().map(|p| p.deficiency_sup).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Samples paths from `B(θ_true)` and follows the class mixture along each.
pub fn dense_experiment(config: &DenseConfig) -> Result<DenseReport> {
    if config.n == 0 || config.paths == 0 {
        return Err(Error::InvalidParameter("dense experiment needs n ≥ 1 and at least one path".into()));
    }
    let mixture = Mixture::from_class(&config.class, &config.weights)?;
    let truth = BernoulliModel::new(config.theta_true.clone())?;
    let in_class = config.class.contains(&config.theta_true);
    let warning = (!in_class).then(|| {
        format!(
            "θ_true = {} is not in the class; convergence is not asserted",
            config.theta_true
        )
    });
    let nearest_theta = config
        .class
        .thetas()
        .iter()
        .filter(|t| **t != config.theta_true)
        .min_by(|a, b| {
            let da = (*a - &config.theta_true).abs();
            let db = (*b - &config.theta_true).abs();
            da.cmp(&db)
        })
        .cloned();
    let nearest = nearest_theta.clone().map(BernoulliModel::new).transpose()?;
    let window = ((config.n / 10).max(1), config.n);

    let runs: Vec<(DensePath, Option<DenseTrace>)> = (0..config.paths as u64)
        .into_par_iter()
        .map(|stream| {
            let seq = sample_stream(&truth, config.n, config.seed, stream)?;
            run_path(&mixture, &truth, nearest.as_ref(), &seq, window, stream)
        })
        .collect::<Result<_>>()?;
    let mut paths = Vec::with_capacity(runs.len());
    let mut trace = None;
    for (path, t) in runs {
        if trace.is_none() {
            trace = t;
        }
        paths.push(path);
    }
    let mut trace = trace.expect("at least one path");
    trace.nearest_theta = nearest_theta;
    let mean = paths.iter().map(|p| p.last_decade_deviation).sum::<f64>() / paths.len() as f64;
    Ok(DenseReport {
        theta_true: config.theta_true.clone(),
        in_class,
        warning,
        window,
        paths,
        mean_last_decade_deviation: mean,
        trace,
    })
}

fn run_path(
    mixture: &Mixture,
    truth: &BernoulliModel,
    nearest: Option<&BernoulliModel>,
    seq: &[u8],
    window: (usize, usize),
    stream: u64,
) -> Result<(DensePath, Option<DenseTrace>)> {
    let keep = stream == 0;
    let theta = truth.theta_f64();
    let mut post = PosteriorState::new(mixture);
    let (mut ones, mut sup, mut dev_sum, mut last) = (0usize, 0.0f64, 0.0, 0.0);
    let mut trace = DenseTrace {
        predictive: Vec::new(),
        deficiency_true: Vec::new(),
        deficiency_nearest: Vec::new(),
        nearest_theta: None,
    };
    for (i, &x) in seq.iter().enumerate() {
        let t = i + 1;
        let p1 = post.predictive(1)?.prob();
        last = p1;
        if t >= window.0 {
            dev_sum += (p1 - theta).abs();
        }
        post.observe(x)?;
        ones += x as usize;
        let zeros = t - ones;
        let evidence = post.evidence().ln();
        let d = evidence - truth.log_likelihood(ones, zeros).ln();
        sup = sup.max(d);
        if keep {
            trace.predictive.push(p1);
            trace.deficiency_true.push(d);
            if let Some(m) = nearest {
                trace.deficiency_nearest.push(evidence - m.log_likelihood(ones, zeros).ln());
            }
        }
    }
    let path = DensePath {
        stream,
        last_decade_deviation: dev_sum / (window.1 - window.0 + 1) as f64,
        deficiency_sup: sup,
        final_predictive: last,
    };
    Ok((path, keep.then_some(trace)))
}

/// `sup_t ln ξ(x_{1:t}) - ln ν(x_{1:t})` for every component `ν`, in
/// component order. Components that rule out `seq` report `+∞`.
pub fn deficiency_sups(mixture: &Mixture, seq: &[u8]) -> Result<Vec<(String, f64)>> {
    let mut post = PosteriorState::new(mixture);
    let mut sups = vec![0.0f64; mixture.len()];
    for &x in seq {
        post.observe(x)?;
        let evidence = post.evidence().ln();
        for (s, lj) in sups.iter_mut().zip(post.component_log_joints()) {
            let d = if lj.is_zero() { f64::INFINITY } else { evidence - lj.ln() };
            *s = s.max(d);
        }
    }
    Ok(mixture
        .components()
        .iter()
        .zip(sups)
        .map(|(c, s)| (c.name().to_string(), s))
        .collect())
}
