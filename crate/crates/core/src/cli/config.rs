use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::mixture::{Backend, WeightChoice};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Dominance,
    ConvergeExact,
    ConvergeMc,
    Gap,
    Dense,
    Diverge,
    SolomonoffInvariants,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Dominance,
        Experiment::ConvergeExact,
        Experiment::ConvergeMc,
        Experiment::Gap,
        Experiment::Dense,
        Experiment::Diverge,
        Experiment::SolomonoffInvariants,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Dominance => "dominance",
            Experiment::ConvergeExact => "converge-exact",
            Experiment::ConvergeMc => "converge-mc",
            Experiment::Gap => "gap",
            Experiment::Dense => "dense",
            Experiment::Diverge => "diverge",
            Experiment::SolomonoffInvariants => "solomonoff-invariants",
        }
    }

    /// Largest `n` accepted by experiments that enumerate every string.
    pub fn horizon_cap(self) -> Option<usize> {
        match self {
            Experiment::Dominance => Some(20),
            Experiment::ConvergeExact => Some(24),
            Experiment::SolomonoffInvariants => Some(12),
            _ => None,
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Experiment::ALL.iter().map(|e| e.as_str()).collect();
                Error::Configuration(format!("unknown experiment {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    /// `{p/q : q ≤ Q}`.
    Dense,
    /// `thetas` if given, else `([0, lo] ∪ [hi, 1]) ∩ {p/q : q ≤ Q}`.
    Gapped,
    /// Exactly `thetas`.
    Custom,
}

impl ClassKind {
    fn as_str(self) -> &'static str {
        match self {
            ClassKind::Dense => "dense",
            ClassKind::Gapped => "gapped",
            ClassKind::Custom => "custom",
        }
    }
}

impl FromStr for ClassKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(ClassKind::Dense),
            "gapped" => Ok(ClassKind::Gapped),
            "custom" => Ok(ClassKind::Custom),
            _ => Err(Error::Configuration(format!("unknown class {s:?}; expected dense, gapped or custom"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    Uniform,
    Surrogate,
    Explicit,
}

impl WeightKind {
    fn as_str(self) -> &'static str {
        match self {
            WeightKind::Uniform => "uniform",
            WeightKind::Surrogate => "surrogate",
            WeightKind::Explicit => "explicit",
        }
    }
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WeightKind::Uniform),
            "surrogate" => Ok(WeightKind::Surrogate),
            "explicit" => Ok(WeightKind::Explicit),
            _ => Err(Error::Configuration(format!(
                "unknown weights {s:?}; expected uniform, surrogate or explicit"
            ))),
        }
    }
}

pub(crate) fn backend_name(b: Backend) -> &'static str {
    match b {
        Backend::Exact => "exact",
        Backend::Float => "float",
    }
}

pub fn parse_backend(s: &str) -> Result<Backend> {
    match s {
        "exact" => Ok(Backend::Exact),
        "float" => Ok(Backend::Float),
        _ => Err(Error::Configuration(format!("unknown backend {s:?}; expected exact or float"))),
    }
}

/// Parses `p/q` or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Configuration(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// Parses a comma-separated list of rationals; the empty string is the empty list.
pub fn parse_rational_list(s: &str) -> Result<Vec<BigRational>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_rational).collect()
}

fn join(list: &[BigRational]) -> String {
    list.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
}

/// Every knob of an experiment run. Serializes to `key = value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub class: ClassKind,
    /// Denominator bound `Q` for dense and gapped classes.
    pub q: u32,
    pub thetas: Vec<BigRational>,
    /// Gap endpoints `(lo, hi)`.
    pub gap: (BigRational, BigRational),
    pub weights: WeightKind,
    pub weight_values: Vec<BigRational>,
    /// Horizon; for enumerating experiments also the enumeration depth.
    pub n: usize,
    pub seed: u64,
    /// Monte Carlo paths.
    pub samples: usize,
    pub backend: Backend,
    pub out: PathBuf,
    pub theta_true: BigRational,
    /// Program-length budget `L`.
    pub max_bits: u32,
    /// Step budget `T`.
    pub max_steps: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::Diverge,
            class: ClassKind::Dense,
            q: 8,
            thetas: Vec::new(),
            gap: (crate::measure::ratio(1, 4), crate::measure::ratio(1, 2)),
            weights: WeightKind::Surrogate,
            weight_values: Vec::new(),
            n: 10_000,
            seed: 1,
            samples: 1_000,
            backend: Backend::Float,
            out: PathBuf::from("out"),
            theta_true: crate::measure::ratio(1, 3),
            max_bits: 16,
            max_steps: 10_000,
        }
    }
}

const KEYS: [&str; 15] = [
    "experiment",
    "class",
    "q",
    "thetas",
    "gap",
    "weights",
    "weight_values",
    "n",
    "seed",
    "samples",
    "backend",
    "out",
    "theta_true",
    "max_bits",
    "max_steps",
];

impl ExperimentConfig {
    pub fn keys() -> &'static [&'static str] {
        &KEYS
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let num = |what: &str| Error::Configuration(format!("{what} must be a non-negative integer, got {value:?}"));
        match key {
            "experiment" => self.experiment = value.parse()?,
            "class" => self.class = value.parse()?,
            "q" => self.q = value.parse().map_err(|_| num("q"))?,
            "thetas" => self.thetas = parse_rational_list(value)?,
            "gap" => {
                let v = parse_rational_list(value)?;
                let [lo, hi] = <[BigRational; 2]>::try_from(v)
                    .map_err(|_| Error::Configuration(format!("gap needs two endpoints, got {value:?}")))?;
                self.gap = (lo, hi);
            }
            "weights" => self.weights = value.parse()?,
            "weight_values" => self.weight_values = parse_rational_list(value)?,
            "n" => self.n = value.parse().map_err(|_| num("n"))?,
            "seed" => self.seed = value.parse().map_err(|_| num("seed"))?,
            "samples" => self.samples = value.parse().map_err(|_| num("samples"))?,
            "backend" => self.backend = parse_backend(value)?,
            "out" => self.out = PathBuf::from(value),
            "theta_true" => self.theta_true = parse_rational(value)?,
            "max_bits" => self.max_bits = value.parse().map_err(|_| num("max_bits"))?,
            "max_steps" => self.max_steps = value.parse().map_err(|_| num("max_steps"))?,
            other => return Err(Error::Configuration(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Reads `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Configuration(format!("line {}: expected key = value, got {raw:?}", i + 1))
            })?;
            cfg.set(key.trim(), value)
                .map_err(|e| Error::Configuration(format!("line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    fn value_of(&self, key: &str) -> String {
        match key {
            "experiment" => self.experiment.to_string(),
            "class" => self.class.as_str().into(),
            "q" => self.q.to_string(),
            "thetas" => join(&self.thetas),
            "gap" => format!("{},{}", self.gap.0, self.gap.1),
            "weights" => self.weights.as_str().into(),
            "weight_values" => join(&self.weight_values),
            "n" => self.n.to_string(),
            "seed" => self.seed.to_string(),
            "samples" => self.samples.to_string(),
            "backend" => backend_name(self.backend).into(),
            "out" => self.out.display().to_string(),
            "theta_true" => self.theta_true.to_string(),
            "max_bits" => self.max_bits.to_string(),
            "max_steps" => self.max_steps.to_string(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    /// Every key, one `key = value` line each, in a fixed order.
    pub fn serialize(&self) -> String {
        KEYS.iter().map(|k| format!("{k} = {}\n", self.value_of(k))).collect()
    }

    pub fn weight_choice(&self) -> WeightChoice {
        match self.weights {
            WeightKind::Uniform => WeightChoice::Uniform,
            WeightKind::Surrogate => WeightChoice::Surrogate,
            WeightKind::Explicit => WeightChoice::Explicit(self.weight_values.clone()),
        }
    }

    /// Checks what can be checked without running anything.
    pub fn validate(&self) -> Result<()> {
        if let Some(cap) = self.experiment.horizon_cap() {
            if self.n > cap {
                return Err(Error::Configuration(format!(
                    "{} enumerates every string up to length n; n = {} exceeds the cap {cap}",
                    self.experiment, self.n
                )));
            }
        }
        if self.n == 0 {
            return Err(Error::Configuration("n must be at least 1".into()));
        }
        if matches!(self.experiment, Experiment::Diverge | Experiment::ConvergeMc) && self.n < 10 {
            return Err(Error::Configuration(format!("{} needs n ≥ 10", self.experiment)));
        }
        if matches!(self.experiment, Experiment::ConvergeMc | Experiment::Dense) && self.samples < 2 {
            return Err(Error::Configuration("samples must be at least 2".into()));
        }
        if self.weights == WeightKind::Explicit && self.weight_values.is_empty() {
            return Err(Error::Configuration("weights = explicit needs weight_values".into()));
        }
        if self.class == ClassKind::Custom && self.thetas.is_empty() {
            return Err(Error::Configuration("class = custom needs thetas".into()));
        }
        if self.q == 0 {
            return Err(Error::Configuration("q must be at least 1".into()));
        }
        crate::solomonoff::Budget::new(self.max_bits, self.max_steps)
            .map_err(|e| Error::Configuration(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let d = ExperimentConfig::default();
        assert_eq!(d.n, 10_000);
        assert_eq!(d.backend, Backend::Float);
        assert_eq!(d.q, 8);
        let text = d.serialize();
        assert!(text.contains("n = 10000\n"));
        assert!(text.contains("backend = float\n"));
        assert!(text.contains("q = 8\n"));
        assert_eq!(text.lines().count(), KEYS.len());
    }

    #[test]
    fn round_trip() {
        use crate::measure::ratio;
        let c = ExperimentConfig {
            experiment: Experiment::Gap,
            class: ClassKind::Gapped,
            thetas: vec![ratio(1, 4), ratio(1, 2)],
            weights: WeightKind::Explicit,
            weight_values: vec![ratio(1, 2), ratio(1, 2)],
            backend: Backend::Exact,
            ..ExperimentConfig::default()
        };
        let text = c.serialize();
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.serialize(), text);
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = ExperimentConfig::parse("# run\n\nexperiment = gap # inline\n n=50 \n").unwrap();
        assert_eq!(c.experiment, Experiment::Gap);
        assert_eq!(c.n, 50);
    }

    #[test]
    fn rejects_unknown_keys_and_values() {
        assert!(matches!(ExperimentConfig::parse("horizon = 3"), Err(Error::Configuration(_))));
        assert!(ExperimentConfig::parse("experiment = nope").is_err());
        assert!(ExperimentConfig::parse("n = -4").is_err());
        assert!(ExperimentConfig::parse("gap = 1/4").is_err());
        assert!(ExperimentConfig::parse("theta_true = 1/0").is_err());
        assert!(ExperimentConfig::parse("just text").is_err());
    }

    #[test]
    fn horizon_caps() {
        let mut c = ExperimentConfig {
            experiment: Experiment::Dominance,
            ..ExperimentConfig::default()
        };
        assert!(c.validate().is_err());
        c.n = 8;
        assert!(c.validate().is_ok());
    }
}
