use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::logprob::{ExactProb, LogProb};
use super::seq::{Alphabet, Seq};
use crate::error::{Error, Result};

/// Longest string the exact-rational backend accepts by default.
pub const DEFAULT_ORACLE_HORIZON: usize = 20;

/// Slack for identities that hold exactly in real arithmetic.
pub const EXACT_IDENTITY_TOL: f64 = 1e-12;

/// Slack for comparisons between the float and the rational backends.
pub const CROSS_BACKEND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    /// Conditionals sum to one at every reachable history.
    Measure,
    /// Conditionals may sum to less than one.
    Semimeasure,
}

/// A (semi)measure on sequences presented through its next-symbol
/// conditionals `ρ(a | h)`.
///
/// Implementations must be pure: the same history always yields the same
/// conditional. The joint of the empty string is 1.
pub trait PredictiveModel: Send + Sync {
    fn name(&self) -> &str;

    fn kind(&self) -> MeasureKind;

    fn alphabet(&self) -> Alphabet {
        Alphabet::BINARY
    }

    /// `ρ(symbol | history)`.
    fn conditional(&self, history: &[u8], symbol: u8) -> Result<LogProb>;

    /// Whether [`PredictiveModel::conditional_exact`] is implemented.
    fn has_exact(&self) -> bool {
        false
    }

    fn conditional_exact(&self, _history: &[u8], _symbol: u8) -> Result<ExactProb> {
        Err(Error::UnsupportedBackend(self.name().to_string()))
    }

    /// `ρ(x)` by the chain rule. Models with a closed form override this.
    fn joint(&self, x: &[u8]) -> Result<LogProb> {
        chain_rule_joint(self, x)
    }
}

impl fmt::Debug for dyn PredictiveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({:?})", self.name(), self.kind())
    }
}

/// `Π_t ρ(x_t | x_{<t})`, stopping early once the product reaches zero.
pub fn chain_rule_joint<M: PredictiveModel + ?Sized>(model: &M, x: &[u8]) -> Result<LogProb> {
    let mut acc = LogProb::ONE;
    for t in 0..x.len() {
        acc = acc * model.conditional(&x[..t], x[t])?;
        if acc.is_zero() {
            return Ok(LogProb::ZERO);
        }
    }
    Ok(acc)
}

/// `ρ(x)` in the log domain, after validating `x` against the model's alphabet.
pub fn joint<M: PredictiveModel + ?Sized>(model: &M, x: &[u8]) -> Result<LogProb> {
    model.alphabet().validate(x)?;
    model.joint(x)
}

/// `ρ(x)` as an exact rational, limited to the default oracle horizon.
pub fn joint_exact<M: PredictiveModel + ?Sized>(model: &M, x: &[u8]) -> Result<ExactProb> {
    joint_exact_within(model, x, DEFAULT_ORACLE_HORIZON)
}

pub fn joint_exact_within<M: PredictiveModel + ?Sized>(
    model: &M,
    x: &[u8],
    horizon: usize,
) -> Result<ExactProb> {
    model.alphabet().validate(x)?;
    if !model.has_exact() {
        return Err(Error::UnsupportedBackend(model.name().to_string()));
    }
    if x.len() > horizon {
        return Err(Error::OracleHorizonExceeded {
            len: x.len(),
            horizon,
        });
    }
    let mut acc = ExactProb::one();
    for t in 0..x.len() {
        if acc.is_zero() {
            break;
        }
        acc = &acc * &model.conditional_exact(&x[..t], x[t])?;
    }
    Ok(acc)
}

/// Bernoulli(θ): every symbol is 1 with probability θ, independently.
#[derive(Clone)]
pub struct BernoulliModel {
    theta: BigRational,
    ln_one: f64,
    ln_zero: f64,
    name: String,
}

impl BernoulliModel {
    pub fn new(theta: BigRational) -> Result<Self> {
        if theta < BigRational::zero() || theta > BigRational::one() {
            return Err(Error::InvalidParameter(format!("θ = {theta} outside [0, 1]")));
        }
        let p = ExactProb::new(theta.clone());
        let ln_one = p.to_log().ln();
        let ln_zero = p.complement().to_log().ln();
        let name = format!("B({theta})");
        Ok(BernoulliModel {
            theta,
            ln_one,
            ln_zero,
            name,
        })
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Self::new(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn theta(&self) -> &BigRational {
        &self.theta
    }

    pub fn theta_f64(&self) -> f64 {
        self.theta.to_f64().unwrap_or(f64::NAN)
    }

    /// `k ln θ + (n - k) ln(1 - θ)` with the `0 · ln 0 = 0` convention.
    pub fn log_likelihood(&self, ones: usize, zeros: usize) -> LogProb {
        let term = |count: usize, ln: f64| if count == 0 { 0.0 } else { count as f64 * ln };
        let ln = term(ones, self.ln_one) + term(zeros, self.ln_zero);
        if ln == f64::NEG_INFINITY {
            LogProb::ZERO
        } else {
            LogProb::from_ln(ln)
        }
    }
}

impl PredictiveModel for BernoulliModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> MeasureKind {
        MeasureKind::Measure
    }

    fn conditional(&self, _history: &[u8], symbol: u8) -> Result<LogProb> {
        match symbol {
            0 => Ok(LogProb::from_ln(self.ln_zero)),
            1 => Ok(LogProb::from_ln(self.ln_one)),
            s => Err(Error::SymbolOutOfAlphabet {
                symbol: s,
                position: 0,
                alphabet_size: 2,
            }),
        }
    }

    fn has_exact(&self) -> bool {
        true
    }

    fn conditional_exact(&self, _history: &[u8], symbol: u8) -> Result<ExactProb> {
        match symbol {
            0 => Ok(ExactProb::new(BigRational::one() - &self.theta)),
            1 => Ok(ExactProb::new(self.theta.clone())),
            s => Err(Error::SymbolOutOfAlphabet {
                symbol: s,
                position: 0,
                alphabet_size: 2,
            }),
        }
    }

    fn joint(&self, x: &[u8]) -> Result<LogProb> {
        let ones = x.iter().filter(|&&s| s == 1).count();
        Ok(self.log_likelihood(ones, x.len() - ones))
    }
}

/// `ρ(1 | x_{<t}) = ½ t^(-exponent)` with `t = ℓ(x_{<t}) + 1`.
#[derive(Debug, Clone)]
pub struct VanishingPairModel {
    exponent: u32,
    name: String,
}

impl VanishingPairModel {
    pub fn new(exponent: u32) -> Self {
        VanishingPairModel {
            exponent,
            name: format!("vanishing(t^-{exponent})"),
        }
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// `ρ(1 | ·)` at time `t ≥ 1`.
    pub fn one_probability(&self, t: usize) -> f64 {
        0.5 * (t as f64).powi(-(self.exponent as i32))
    }
}

impl PredictiveModel for VanishingPairModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn kind(&self) -> MeasureKind {
        MeasureKind::Measure
    }

    fn conditional(&self, history: &[u8], symbol: u8) -> Result<LogProb> {
        let p1 = self.one_probability(history.len() + 1);
        match symbol {
            0 => Ok(LogProb::from_ln((-p1).ln_1p())),
            1 => Ok(LogProb::from_prob(p1)),
            s => Err(Error::SymbolOutOfAlphabet {
                symbol: s,
                position: history.len(),
                alphabet_size: 2,
            }),
        }
    }

    fn has_exact(&self) -> bool {
        true
    }

    fn conditional_exact(&self, history: &[u8], symbol: u8) -> Result<ExactProb> {
        let t = BigInt::from(history.len() + 1);
        let p1 = BigRational::new(BigInt::one(), BigInt::from(2) * num_traits::pow(t, self.exponent as usize));
        match symbol {
            0 => Ok(ExactProb::new(BigRational::one() - p1)),
            1 => Ok(ExactProb::new(p1)),
            s => Err(Error::SymbolOutOfAlphabet {
                symbol: s,
                position: history.len(),
                alphabet_size: 2,
            }),
        }
    }
}

/// Outcome of an exhaustive (semi)measure-inequality check.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub passed: bool,
    /// Largest violation seen: `|Σ_a ρ(a|h) - 1|` for measures, the excess
    /// `max(0, Σ_a ρ(a|h) - 1)` for semimeasures.
    pub worst_deviation: f64,
    pub worst_history: Option<Seq>,
    pub histories_checked: usize,
}

/// Checks `Σ_a ρ(a | h) ≤ 1` (with equality for measures) at every history
/// of length `0..=horizon` that has positive probability.
pub fn validate_model<M: PredictiveModel + ?Sized>(model: &M, horizon: usize) -> ValidationReport {
    let alphabet = model.alphabet();
    let mut report = ValidationReport {
        passed: true,
        worst_deviation: 0.0,
        worst_history: None,
        histories_checked: 0,
    };
    let note = |dev: f64, h: &Seq, report: &mut ValidationReport| {
        if dev > report.worst_deviation || (dev.is_nan() && report.passed) {
            report.worst_deviation = dev;
            report.worst_history = Some(h.clone());
        }
        if dev.is_nan() || dev > EXACT_IDENTITY_TOL {
            report.passed = false;
        }
    };

    // Depth-first over reachable histories; zero-mass subtrees are unreachable.
    let mut stack = vec![Seq::empty()];
    while let Some(h) = stack.pop() {
        let mut total = 0.0;
        let mut failed = false;
        for a in alphabet.symbols() {
            match model.conditional(&h, a) {
                Ok(c) => {
                    let p = c.prob();
                    if !(0.0..=1.0 + EXACT_IDENTITY_TOL).contains(&p) {
                        failed = true;
                    }
                    total += p;
                    if h.len() < horizon && !c.is_zero() {
                        stack.push(h.extended(a));
                    }
                }
                Err(_) => failed = true,
            }
        }
        report.histories_checked += 1;
        let dev = match model.kind() {
            MeasureKind::Measure => (total - 1.0).abs(),
            MeasureKind::Semimeasure => (total - 1.0).max(0.0),
        };
        note(if failed { f64::NAN } else { dev }, &h, &mut report);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactProb {
        ExactProb::from_ratio(n, d)
    }

    /// Conditionals that sum to 1.1: a deliberately broken model.
    struct Inflated;

    impl PredictiveModel for Inflated {
        fn name(&self) -> &str {
            "inflated"
        }
        fn kind(&self) -> MeasureKind {
            MeasureKind::Semimeasure
        }
        fn conditional(&self, history: &[u8], symbol: u8) -> Result<LogProb> {
            let p = if history.len() == 2 { 0.55 } else { 0.5 };
            let _ = symbol;
            Ok(LogProb::from_prob(p))
        }
    }

    #[test]
    fn bernoulli_joint_values() {
        let half = BernoulliModel::from_ratio(1, 2).unwrap();
        let x = Seq::parse("101").unwrap();
        assert!((joint(&half, &x).unwrap().prob() - 0.125).abs() < 1e-15);
        let quarter = BernoulliModel::from_ratio(1, 4).unwrap();
        assert!((joint(&quarter, &[1]).unwrap().prob() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exact_joint_values() {
        let half = BernoulliModel::from_ratio(1, 2).unwrap();
        assert_eq!(joint_exact(&half, &[1, 1]).unwrap(), q(1, 4));
        let quarter = BernoulliModel::from_ratio(1, 4).unwrap();
        assert_eq!(joint_exact(&quarter, &[1, 0]).unwrap(), q(3, 16));
        assert_eq!(joint_exact(&quarter, &[]).unwrap(), ExactProb::one());
        assert_eq!(joint_exact(&VanishingPairModel::new(3), &[]).unwrap(), ExactProb::one());
    }

    #[test]
    fn vanishing_pair_three_zeros() {
        // (1/2)(15/16)(53/54)
        let mu = VanishingPairModel::new(3);
        let expected = &(&q(1, 2) * &q(15, 16)) * &q(53, 54);
        assert_eq!(joint_exact(&mu, &[0, 0, 0]).unwrap(), expected);
        let float = joint(&mu, &[0, 0, 0]).unwrap().prob();
        assert!((float - expected.to_f64()).abs() / expected.to_f64() < 1e-12);
    }

    #[test]
    fn vanishing_pair_first_step_is_half() {
        for e in [2, 3] {
            let m = VanishingPairModel::new(e);
            assert_eq!(m.conditional_exact(&[], 1).unwrap(), q(1, 2));
            assert_eq!(m.conditional(&[], 1).unwrap().prob(), 0.5);
        }
    }

    #[test]
    fn out_of_alphabet_symbol_is_rejected() {
        let half = BernoulliModel::from_ratio(1, 2).unwrap();
        assert!(matches!(
            joint(&half, &[0, 2]),
            Err(Error::SymbolOutOfAlphabet { symbol: 2, position: 1, .. })
        ));
    }

    #[test]
    fn exact_backend_unsupported_and_horizon() {
        assert!(matches!(joint_exact(&Inflated, &[0]), Err(Error::UnsupportedBackend(_))));
        let half = BernoulliModel::from_ratio(1, 2).unwrap();
        assert!(matches!(
            joint_exact(&half, &[0; 21]),
            Err(Error::OracleHorizonExceeded { len: 21, horizon: 20 })
        ));
    }

    #[test]
    fn degenerate_bernoulli_endpoints() {
        let zero = BernoulliModel::from_ratio(0, 1).unwrap();
        assert!(joint(&zero, &[0, 1]).unwrap().is_zero());
        assert_eq!(joint(&zero, &[0, 0, 0]).unwrap().prob(), 1.0);
        assert!(BernoulliModel::from_ratio(5, 4).is_err());
    }

    #[test]
    fn validation_passes_for_measures() {
        let r = validate_model(&BernoulliModel::from_ratio(1, 3).unwrap(), 5);
        assert!(r.passed);
        assert!(r.worst_deviation <= 1e-12);
        assert_eq!(r.histories_checked, 63);
        assert!(validate_model(&VanishingPairModel::new(2), 8).passed);
    }

    #[test]
    fn validation_flags_broken_model() {
        let r = validate_model(&Inflated, 4);
        assert!(!r.passed);
        assert!((r.worst_deviation - 0.1).abs() < 1e-12);
        assert_eq!(r.worst_history.unwrap().len(), 2);
    }
}
