use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use super::machine::{bit_string, Exec, MonotoneMachine, ProgramFamilyMachine, Stop};
use super::{Budget, Dyadic};
use crate::coding::gamma_decode;
use crate::error::{Error, Result};
use crate::measure::{Alphabet, Seq};

/// One line of a program listing:
/// `family<TAB>payload_bits<TAB>code_length<TAB>output_prefix`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListingEntry {
    /// Family index, or `None` when the index code itself is cut short.
    pub family: Option<u64>,
    pub payload: Vec<bool>,
    pub code_length: usize,
    pub output: Seq,
}

impl ListingEntry {
    fn from_program(program: &[bool], output: Seq) -> Self {
        let (family, payload) = match gamma_decode(program) {
            Some((f, used)) => (Some(f), program[used..].to_vec()),
            None => (None, program.to_vec()),
        };
        ListingEntry {
            family,
            payload,
            code_length: program.len(),
            output,
        }
    }

    /// Parses a line produced by `Display`.
    pub fn parse(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split('\t').collect();
        let [family, payload, len, output] = fields[..] else {
            return Err(Error::InvalidParameter(format!("listing line needs 4 fields: {line:?}")));
        };
        let bad = |what: &str| Error::InvalidParameter(format!("bad {what} in {line:?}"));
        Ok(ListingEntry {
            family: match family {
                "-" => None,
                f => Some(f.parse().map_err(|_| bad("family"))?),
            },
            payload: super::parse_bits(payload)?,
            code_length: len.parse().map_err(|_| bad("code length"))?,
            output: if output == "ε" { Seq::empty() } else { Seq::parse(output)? },
        })
    }
}

impl fmt::Display for ListingEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Some(fam) => write!(f, "{fam}")?,
            None => write!(f, "-")?,
        }
        write!(
            f,
            "\t{}\t{}\t{}",
            bit_string(&self.payload),
            self.code_length,
            self.output
        )
    }
}

/// The whole table `x ↦ M_{L,T}(x)` for `ℓ(x) ≤ horizon`, from one pass over
/// the program tree.
///
/// A node contributes `2^{-ℓ(p)}` to every prefix of its output that is
/// longer than its parent's output; this matches [`super::lower_approx`]
/// string by string.
#[derive(Debug, Clone)]
pub struct StagedApprox {
    budget: Budget,
    horizon: usize,
    alphabet: Alphabet,
    /// Numerators over `2^L`.
    table: HashMap<Seq, u64>,
    complete: Vec<ListingEntry>,
    nodes_explored: usize,
}

impl StagedApprox {
    pub fn build(machine: &dyn MonotoneMachine, budget: Budget, horizon: usize) -> Result<Self> {
        let budget = Budget::new(budget.max_bits, budget.max_steps)?;
        let l = budget.max_bits;
        let mut table: HashMap<Seq, u64> = HashMap::new();
        let mut complete = Vec::new();
        let mut nodes_explored = 0;
        let mut level: Vec<(Vec<bool>, Option<usize>)> = vec![(Vec::new(), None)];
        for depth in 0..=l {
            nodes_explored += level.len();
            let runs: Vec<(Vec<u8>, Stop, usize)> = level
                .par_iter()
                .map(|(p, _)| {
                    let mut exec = Exec::new(p, budget.max_steps).with_cap(horizon);
                    let stop = machine.execute(&mut exec);
                    let read = exec.bits_read();
                    (exec.into_output(), stop, read)
                })
                .collect();
            let mut next = Vec::new();
            for ((p, parent_len), (out, stop, read)) in level.into_iter().zip(runs) {
                let weight = 1u64 << (l - depth);
                let first = parent_len.map_or(0, |n| n + 1);
                for k in first..=out.len() {
                    *table.entry(Seq::from(&out[..k])).or_insert(0) += weight;
                }
                if stop != Stop::NeedsMoreProgram && read == p.len() {
                    complete.push(ListingEntry::from_program(&p, Seq::new(out.clone())));
                }
                if stop == Stop::NeedsMoreProgram && depth < l && out.len() < horizon {
                    let mut zero = p.clone();
                    zero.push(false);
                    let mut one = p;
                    one.push(true);
                    next.push((zero, Some(out.len())));
                    next.push((one, Some(out.len())));
                }
            }
            if next.is_empty() {
                break;
            }
            level = next;
        }
        Ok(StagedApprox {
            budget,
            horizon,
            alphabet: machine.alphabet(),
            table,
            complete,
            nodes_explored,
        })
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn nodes_explored(&self) -> usize {
        self.nodes_explored
    }

    pub fn value(&self, x: &[u8]) -> Result<Dyadic> {
        if x.len() > self.horizon {
            return Err(Error::InvalidParameter(format!(
                "string of length {} beyond table horizon {}",
                x.len(),
                self.horizon
            )));
        }
        self.alphabet.validate(x)?;
        let num = self.table.get(x).copied().unwrap_or(0);
        Ok(Dyadic::new(num, self.budget.max_bits))
    }

    /// Programs that stopped, without asking for more bits, exactly at their
    /// last bit.
    pub fn complete_programs(&self) -> &[ListingEntry] {
        &self.complete
    }

    /// `Σ 2^{-ℓ(p)}` over complete programs.
    pub fn kraft_sum(&self) -> Dyadic {
        self.complete
            .iter()
            .map(|e| Dyadic::pow2_neg(e.code_length as u32))
            .sum()
    }

    /// Listing of complete programs, one per line.
    pub fn listing(&self) -> String {
        self.complete.iter().map(|e| format!("{e}\n")).collect()
    }

    /// Smallest `M(x) - Σ_a M(xa)` over all `x` shorter than the horizon,
    /// as `(slack, x)`, together with `1 - M(ε)`.
    pub fn semimeasure_slack(&self) -> (f64, Seq) {
        let mut worst = (1.0 - self.value(&[]).map_or(0.0, Dyadic::to_f64), Seq::empty());
        for x in self.alphabet.strings_up_to(self.horizon.saturating_sub(1)) {
            let parent = self.table.get(&x[..]).copied().unwrap_or(0) as i128;
            let children: i128 = self
                .alphabet
                .symbols()
                .map(|a| self.table.get(&x.extended(a)[..]).copied().unwrap_or(0) as i128)
                .sum();
            let slack = (parent - children) as f64 * (-(self.budget.max_bits as f64)).exp2();
            if slack < worst.0 {
                worst = (slack, x);
            }
        }
        worst
    }

    /// A string with `M(x) > Σ_a M(xa)`, shortest first.
    pub fn strict_witness(&self) -> Option<Seq> {
        self.alphabet
            .strings_up_to(self.horizon.saturating_sub(1))
            .find(|x| {
                let parent = self.table.get(&x[..]).copied().unwrap_or(0);
                let children: u64 = self
                    .alphabet
                    .symbols()
                    .map(|a| self.table.get(&x.extended(a)[..]).copied().unwrap_or(0))
                    .sum();
                parent > children
            })
    }

    /// `M_{L,T}(x) ≥ 2^{-ℓ(p)}` for each `(x, p)`.
    pub fn dominance(&self, programs: &[(Seq, Vec<bool>)]) -> Result<Vec<ProgramDominance>> {
        programs
            .iter()
            .map(|(x, p)| {
                let value = self.value(x)?;
                let required = Dyadic::pow2_neg(p.len() as u32);
                Ok(ProgramDominance {
                    output: x.clone(),
                    code_length: p.len(),
                    value,
                    required,
                    holds: value >= required,
                })
            })
            .collect()
    }
}

/// Result of comparing a stage value with one registered program's weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramDominance {
    pub output: Seq,
    pub code_length: usize,
    pub value: Dyadic,
    pub required: Dyadic,
    pub holds: bool,
}

/// Print programs for every string of length `1..=max_len`, shortest first.
pub fn literal_programs(machine: &ProgramFamilyMachine, max_len: usize) -> Result<Vec<(Seq, Vec<bool>)>> {
    machine
        .alphabet()
        .strings_up_to(max_len)
        .filter(|x| !x.is_empty())
        .map(|x| {
            let p = machine.encode_print(&x)?;
            Ok((x, p))
        })
        .collect()
}

/// Outcome of decoding every bit string up to a length.
#[derive(Debug, Clone)]
pub struct PrefixFreeReport {
    pub strings_checked: usize,
    pub complete_programs: usize,
    /// Pairs `(p, q)` of complete programs with `p` a proper prefix of `q`.
    pub violations: Vec<(Vec<bool>, Vec<bool>)>,
    pub kraft_sum: Dyadic,
}

impl PrefixFreeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.kraft_sum <= Dyadic::ONE
    }
}

/// Runs every bit string of length `≤ max_bits` on its own and collects those
/// that stop exactly at their last bit without asking for more; then checks
/// that none of them is a proper prefix of another.
pub fn check_prefix_free(machine: &dyn MonotoneMachine, max_bits: u32) -> Result<PrefixFreeReport> {
    if max_bits > super::MAX_PROGRAM_BITS {
        return Err(Error::BudgetExceeded(format!("exhaustive decode up to {max_bits} bits")));
    }
    let cap = max_bits as usize + 1;
    let steps = 8 * (max_bits as u64 + 2);
    let strings: Vec<Vec<bool>> = (0..=max_bits)
        .flat_map(|len| {
            (0..1u64 << len).map(move |v| (0..len).rev().map(|i| (v >> i) & 1 == 1).collect())
        })
        .collect();
    let mut complete: Vec<Vec<bool>> = strings
        .par_iter()
        .filter(|p| {
            let mut exec = Exec::new(p, steps).with_cap(cap);
            let stop = machine.execute(&mut exec);
            stop != Stop::NeedsMoreProgram && exec.bits_read() == p.len()
        })
        .cloned()
        .collect();
    complete.sort();
    let violations = complete
        .windows(2)
        .filter(|w| w[1].starts_with(&w[0]))
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    Ok(PrefixFreeReport {
        strings_checked: strings.len(),
        complete_programs: complete.len(),
        kraft_sum: complete.iter().map(|p| Dyadic::pow2_neg(p.len() as u32)).sum(),
        violations,
    })
}
