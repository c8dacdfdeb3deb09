//! Natural-log probabilities and exact rational probabilities.
//!
//! Joint probabilities of long sequences underflow `f64` after a few
//! thousand symbols, so every production path carries `ln p`. Exact
//! rationals back the short-horizon oracles.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A probability stored as its natural logarithm. `-inf` is the zero element.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct LogProb(f64);

impl LogProb {
    pub const ZERO: LogProb = LogProb(f64::NEG_INFINITY);
    pub const ONE: LogProb = LogProb(0.0);

    /// Wraps a natural-log value. NaN is rejected.
    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "LogProb from NaN");
        LogProb(ln)
    }

    pub fn from_prob(p: f64) -> Self {
        assert!(p >= 0.0, "negative probability {p}");
        LogProb(p.ln())
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn prob(self) -> f64 {
        self.0.exp()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `ln(exp(a) + exp(b))` without leaving the log domain.
    pub fn log_add(self, other: LogProb) -> LogProb {
        let (hi, lo) = if self.0 >= other.0 {
            (self.0, other.0)
        } else {
            (other.0, self.0)
        };
        if lo == f64::NEG_INFINITY {
            return LogProb(hi);
        }
        LogProb(hi + (lo - hi).exp().ln_1p())
    }

    /// Log-sum-exp over an iterator, using the running maximum as pivot.
    pub fn sum<I: IntoIterator<Item = LogProb>>(iter: I) -> LogProb {
        let terms: Vec<f64> = iter.into_iter().map(|l| l.0).collect();
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return LogProb::ZERO;
        }
        if max == f64::INFINITY {
            return LogProb(f64::INFINITY);
        }
        let s: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
        LogProb(max + s.ln())
    }
}

impl Mul for LogProb {
    type Output = LogProb;
    #[inline]
    fn mul(self, rhs: LogProb) -> LogProb {
        if self.is_zero() || rhs.is_zero() {
            return LogProb::ZERO;
        }
        LogProb(self.0 + rhs.0)
    }
}

impl Div for LogProb {
    type Output = LogProb;
    /// Division by zero probability yields `+inf`; callers guard against it.
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LogProb) -> LogProb {
        if self.is_zero() {
            return LogProb::ZERO;
        }
        LogProb(self.0 - rhs.0)
    }
}

impl Add for LogProb {
    type Output = LogProb;
    fn add(self, rhs: LogProb) -> LogProb {
        self.log_add(rhs)
    }
}

impl fmt::Debug for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogProb(ln={}, p={:e})", self.0, self.prob())
    }
}

/// An exact non-negative rational probability.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProb(BigRational);

impl ExactProb {
    pub fn new(value: BigRational) -> Self {
        assert!(!value.is_negative(), "negative probability");
        ExactProb(value)
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::new(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn zero() -> Self {
        ExactProb(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactProb(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Nearest `f64`. Values below the subnormal range round to 0; use
    /// [`ExactProb::to_log`] for those.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }

    /// Natural logarithm computed from the digit expansion, exact enough for
    /// values far below `f64::MIN_POSITIVE`.
    pub fn to_log(&self) -> LogProb {
        if self.is_zero() {
            return LogProb::ZERO;
        }
        LogProb::from_ln(big_ln(self.numer()) - big_ln(self.denom()))
    }

    pub fn complement(&self) -> ExactProb {
        ExactProb::new(BigRational::one() - &self.0)
    }
}

fn big_ln(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

impl Mul for &ExactProb {
    type Output = ExactProb;
    fn mul(self, rhs: &ExactProb) -> ExactProb {
        ExactProb(&self.0 * &rhs.0)
    }
}

impl Add for &ExactProb {
    type Output = ExactProb;
    fn add(self, rhs: &ExactProb) -> ExactProb {
        ExactProb(&self.0 + &rhs.0)
    }
}

impl Div for &ExactProb {
    type Output = ExactProb;
    fn div(self, rhs: &ExactProb) -> ExactProb {
        ExactProb(&self.0 / &rhs.0)
    }
}

impl fmt::Debug for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        return 0.0;
    }
    (a - b).abs() / scale
}

/// Compares two log probabilities by their linear-domain relative error.
pub fn log_relative_diff(a: LogProb, b: LogProb) -> f64 {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 1.0,
        _ => {
            let d = (a.ln() - b.ln()).abs();
            -(-d).exp_m1()
        }
    }
}

pub(crate) fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}
