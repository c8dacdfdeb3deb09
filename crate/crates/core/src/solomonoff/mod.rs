//! Budgeted lower approximation of Solomonoff's prior
//! `M(x) = Σ 2^{-ℓ(p)}` over minimal programs `p` whose output starts with `x`.
//!
//! Programs run on a [`MonotoneMachine`]; a program tree is explored
//! breadth-first up to `L` bits with at most `T` machine steps per program.
//! Each stage value `M_{L,T}(x)` is an exact dyadic rational that grows with
//! both budgets and satisfies the semimeasure inequality.

mod machine;
mod semimeasure;
mod staged;

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

pub use machine::{
    bit_string, parse_bits, run_budgeted, symbol_width, Exec, MonotoneMachine, PrintLiteral,
    ProgramFamily, ProgramFamilyMachine, RepeatLiteral, RunResult, RunStatus, Step, Stop,
    Transducer, TransducerFamily,
};
pub use semimeasure::{machine_semimeasure, normalize_machine, MachineSemimeasure, NormalizedMachine};
pub use staged::{
    check_prefix_free, literal_programs, ListingEntry, PrefixFreeReport, ProgramDominance,
    StagedApprox,
};

use crate::error::{Error, Result};
use crate::measure::LogProb;

/// Largest accepted program-length budget.
pub const MAX_PROGRAM_BITS: u32 = 24;
/// Largest accepted step budget.
pub const MAX_STEPS: u64 = 1_000_000;

/// Program-length and step budgets `(L, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Budget {
    pub max_bits: u32,
    pub max_steps: u64,
}

impl Budget {
    pub fn new(max_bits: u32, max_steps: u64) -> Result<Self> {
        if max_bits > MAX_PROGRAM_BITS {
            return Err(Error::BudgetExceeded(format!(
                "L = {max_bits} exceeds {MAX_PROGRAM_BITS}"
            )));
        }
        if max_steps > MAX_STEPS {
            return Err(Error::BudgetExceeded(format!("T = {max_steps} exceeds {MAX_STEPS}")));
        }
        Ok(Budget { max_bits, max_steps })
    }
}

/// `num / 2^exp`, exact.
#[derive(Debug, Clone, Copy)]
pub struct Dyadic {
    num: u64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: u64, exp: u32) -> Self {
        Dyadic { num, exp }.reduced()
    }

    /// `2^{-k}`.
    pub fn pow2_neg(k: u32) -> Self {
        Dyadic { num: 1, exp: k }
    }

    fn reduced(mut self) -> Self {
        if self.num == 0 {
            return Self::ZERO;
        }
        let tz = self.num.trailing_zeros().min(self.exp);
        self.num >>= tz;
        self.exp -= tz;
        self
    }

    pub fn numer(self) -> u64 {
        self.num
    }

    pub fn log2_denom(self) -> u32 {
        self.exp
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 * (-(self.exp as f64)).exp2()
    }

    pub fn to_log(self) -> LogProb {
        if self.num == 0 {
            LogProb::ZERO
        } else {
            LogProb::from_ln((self.num as f64).ln() - self.exp as f64 * std::f64::consts::LN_2)
        }
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(1u8) << self.exp)
    }

    fn scaled(self, exp: u32) -> u128 {
        (self.num as u128) << (exp - self.exp)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.max(other.exp);
        self.scaled(e).cmp(&other.scaled(e))
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        let e = self.exp.max(rhs.exp);
        let sum = self.scaled(e) + rhs.scaled(e);
        Dyadic::new(u64::try_from(sum).expect("dyadic sum overflows u64"), e)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.exp)
        }
    }
}

/// `M_{L,T}(x)`: the sum of `2^{-ℓ(p)}` over programs `p` with `ℓ(p) ≤ L`
/// whose run, stopped when it asks for more program than `p`, halts, runs out
/// of `T` steps or has printed `|x|` symbols, has an output starting with `x`
/// while no proper prefix of `p` qualifies.
pub fn lower_approx(machine: &dyn MonotoneMachine, budget: Budget, x: &[u8]) -> Result<Dyadic> {
    let budget = Budget::new(budget.max_bits, budget.max_steps)?;
    machine.alphabet().validate(x)?;
    let mut total = 0u64;
    let mut level: Vec<Vec<bool>> = vec![Vec::new()];
    for depth in 0..=budget.max_bits {
        let runs: Vec<(usize, Stop)> = level
            .par_iter()
            .map(|p| {
                let mut exec = Exec::new(p, budget.max_steps).with_target(x);
                let stop = machine.execute(&mut exec);
                (exec.output().len(), stop)
            })
            .collect();
        let mut next = Vec::new();
        for (p, (out_len, stop)) in level.into_iter().zip(runs) {
            if out_len >= x.len() {
                total += 1u64 << (budget.max_bits - depth);
            } else if stop == Stop::NeedsMoreProgram && depth < budget.max_bits {
                let mut zero = p.clone();
                zero.push(false);
                let mut one = p;
                one.push(true);
                next.push(zero);
                next.push(one);
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Ok(Dyadic::new(total, budget.max_bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Alphabet;

    fn budget(l: u32, t: u64) -> Budget {
        Budget::new(l, t).unwrap()
    }

    #[test]
    fn dyadic_arithmetic() {
        let a = Dyadic::new(3, 3);
        let b = Dyadic::pow2_neg(1);
        assert_eq!(a + b, Dyadic::new(7, 3));
        assert!(a < Dyadic::new(1, 1) + Dyadic::new(1, 2) + Dyadic::new(1, 3));
        assert_eq!(Dyadic::new(4, 3), Dyadic::pow2_neg(1));
        assert_eq!(Dyadic::new(8, 3), Dyadic::ONE);
        assert_eq!(Dyadic::new(3, 3).to_string(), "3/2^3");
        assert!((Dyadic::new(3, 3).to_log().prob() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn empty_string_has_mass_one() {
        let m = ProgramFamilyMachine::default();
        assert_eq!(lower_approx(&m, budget(10, 100), &[]).unwrap(), Dyadic::ONE);
    }

    #[test]
    fn single_one_is_at_least_two_to_minus_five() {
        let m = ProgramFamilyMachine::default();
        let v = lower_approx(&m, budget(5, 100), &[1]).unwrap();
        assert!(v >= Dyadic::pow2_neg(5), "{v}");
    }

    #[test]
    fn rejects_oversized_budgets() {
        let m = ProgramFamilyMachine::default();
        assert!(lower_approx(&m, Budget { max_bits: 25, max_steps: 10 }, &[]).is_err());
        assert!(Budget::new(8, 1_000_001).is_err());
    }

    #[test]
    fn machine_without_families_has_no_mass_beyond_empty() {
        let m = ProgramFamilyMachine::empty(Alphabet::BINARY);
        assert_eq!(lower_approx(&m, budget(8, 100), &[0]).unwrap(), Dyadic::ZERO);
    }
}
