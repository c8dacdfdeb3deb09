use std::fmt;
use std::sync::Arc;

use crate::coding::gamma_encode;
use crate::error::{Error, Result};
use crate::measure::{Alphabet, Seq};

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stop {
    /// The machine halted; no further output will ever appear.
    Halted,
    /// The machine asked for a program bit past the end of the program.
    NeedsMoreProgram,
    /// The step budget ran out.
    OutOfSteps,
    /// The output reached the requested length.
    OutputCap,
    /// The output stopped agreeing with the target string.
    Inconsistent,
}

impl Stop {
    /// Coarse status: halted, needs more program, or still running.
    pub fn status(self) -> RunStatus {
        match self {
            Stop::Halted => RunStatus::Halted,
            Stop::NeedsMoreProgram => RunStatus::NeedsMoreProgram,
            Stop::OutOfSteps | Stop::OutputCap | Stop::Inconsistent => RunStatus::Ongoing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    Halted,
    Ongoing,
    NeedsMoreProgram,
}

/// `Ok` continues the run, `Err` carries the reason it stopped.
pub type Step<T> = std::result::Result<T, Stop>;

/// Execution context handed to a machine: program bits on demand, an output
/// tape that only grows, and a step counter. Reading a bit or emitting a
/// symbol costs one step.
pub struct Exec<'a> {
    program: &'a [bool],
    pos: usize,
    output: Vec<u8>,
    steps: u64,
    max_steps: u64,
    target: Option<&'a [u8]>,
    cap: Option<usize>,
}

impl<'a> Exec<'a> {
    pub fn new(program: &'a [bool], max_steps: u64) -> Self {
        Exec {
            program,
            pos: 0,
            output: Vec::new(),
            steps: 0,
            max_steps,
            target: None,
            cap: None,
        }
    }

    /// Stops the run as soon as the output leaves `target` or reaches its length.
    pub fn with_target(mut self, target: &'a [u8]) -> Self {
        self.target = Some(target);
        self.cap = Some(target.len());
        self
    }

    /// Stops the run once `cap` symbols have been emitted.
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    fn tick(&mut self) -> Step<()> {
        if self.steps >= self.max_steps {
            return Err(Stop::OutOfSteps);
        }
        self.steps += 1;
        Ok(())
    }

    /// Spends one step doing nothing.
    pub fn idle(&mut self) -> Step<()> {
        self.tick()
    }

    pub fn read_bit(&mut self) -> Step<bool> {
        if self.pos == self.program.len() {
            return Err(Stop::NeedsMoreProgram);
        }
        self.tick()?;
        self.pos += 1;
        Ok(self.program[self.pos - 1])
    }

    /// Reads `width` bits as a big-endian unsigned integer.
    pub fn read_bits(&mut self, width: u32) -> Step<u64> {
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    /// Reads one gamma codeword. Halts as soon as the value is bound to
    /// exceed `max`, or once it does.
    pub fn read_gamma(&mut self, max: Option<u64>) -> Step<u64> {
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros >= 63 || max.is_some_and(|m| (1u64 << zeros) > m) {
                return Err(Stop::Halted);
            }
        }
        let value = (1u64 << zeros) | self.read_bits(zeros)?;
        if max.is_some_and(|m| value > m) {
            return Err(Stop::Halted);
        }
        Ok(value)
    }

    pub fn emit(&mut self, symbol: u8) -> Step<()> {
        if self.cap.is_some_and(|c| self.output.len() >= c) {
            return Err(Stop::OutputCap);
        }
        self.tick()?;
        if let Some(t) = self.target {
            if t[self.output.len()] != symbol {
                return Err(Stop::Inconsistent);
            }
        }
        self.output.push(symbol);
        if self.cap.is_some_and(|c| self.output.len() >= c) {
            return Err(Stop::OutputCap);
        }
        Ok(())
    }

    pub fn output(&self) -> &[u8] {
        &self.output
    }

    pub fn bits_read(&self) -> usize {
        self.pos
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn into_output(self) -> Vec<u8> {
        self.output
    }
}

/// A monotone machine: reads program bits on demand and writes output that is
/// never retracted. Behaviour depends only on the bits actually read.
pub trait MonotoneMachine: Send + Sync {
    fn alphabet(&self) -> Alphabet;
    fn execute(&self, exec: &mut Exec<'_>) -> Stop;
}

/// Result of [`run_budgeted`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub output: Seq,
    pub bits_read: usize,
    pub steps: u64,
    pub stop: Stop,
}

impl RunResult {
    pub fn status(&self) -> RunStatus {
        self.stop.status()
    }
}

/// Runs `program` for at most `max_steps` steps.
pub fn run_budgeted(machine: &dyn MonotoneMachine, program: &[bool], max_steps: u64) -> RunResult {
    let mut exec = Exec::new(program, max_steps);
    let stop = machine.execute(&mut exec);
    RunResult {
        bits_read: exec.bits_read(),
        steps: exec.steps(),
        output: Seq::new(exec.into_output()),
        stop,
    }
}

/// One family of programs. Runs after the family index has been read.
pub trait ProgramFamily: Send + Sync {
    fn name(&self) -> &str;
    fn execute(&self, exec: &mut Exec<'_>, alphabet: Alphabet) -> Step<()>;
}

/// Bits per symbol in literal payloads.
pub fn symbol_width(alphabet: Alphabet) -> u32 {
    usize::BITS - (alphabet.size() - 1).leading_zeros()
}

fn read_literal(exec: &mut Exec<'_>, alphabet: Alphabet) -> Step<Vec<u8>> {
    let len = exec.read_gamma(None)? - 1;
    let width = symbol_width(alphabet);
    let mut out = Vec::new();
    for _ in 0..len {
        let v = exec.read_bits(width)?;
        if v as usize >= alphabet.size() {
            return Err(Stop::Halted);
        }
        out.push(v as u8);
    }
    Ok(out)
}

fn encode_literal_payload(x: &[u8], alphabet: Alphabet) -> Result<Vec<bool>> {
    alphabet.validate(x)?;
    let width = symbol_width(alphabet);
    let mut bits = gamma_encode(x.len() as u64 + 1);
    for &s in x {
        bits.extend((0..width).rev().map(|i| (s >> i) & 1 == 1));
    }
    Ok(bits)
}

/// Family 1: a literal string, printed once the whole literal has been read;
/// then halt.
pub struct PrintLiteral;

impl ProgramFamily for PrintLiteral {
    fn name(&self) -> &str {
        "print"
    }

    fn execute(&self, exec: &mut Exec<'_>, alphabet: Alphabet) -> Step<()> {
        let lit = read_literal(exec, alphabet)?;
        for s in lit {
            exec.emit(s)?;
        }
        Err(Stop::Halted)
    }
}

/// Family 2: a literal printed over and over; an empty literal idles forever.
pub struct RepeatLiteral;

impl ProgramFamily for RepeatLiteral {
    fn name(&self) -> &str {
        "repeat"
    }

    fn execute(&self, exec: &mut Exec<'_>, alphabet: Alphabet) -> Step<()> {
        let lit = read_literal(exec, alphabet)?;
        loop {
            if lit.is_empty() {
                exec.idle()?;
            }
            for &s in &lit {
                exec.emit(s)?;
            }
        }
    }
}

/// A finite-state transducer over program bits with at most four states.
/// `table[state][bit] = (next state, optional output symbol)`; runs from
/// state 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    pub table: Vec<[(usize, Option<u8>); 2]>,
}

impl Transducer {
    pub const MAX_STATES: usize = 4;

    pub fn states(&self) -> usize {
        self.table.len()
    }

    fn state_width(states: usize) -> u32 {
        usize::BITS - (states - 1).leading_zeros()
    }
}

/// Family 3: a transducer table, then the rest of the program is its input.
pub struct TransducerFamily;

impl ProgramFamily for TransducerFamily {
    fn name(&self) -> &str {
        "transducer"
    }

    fn execute(&self, exec: &mut Exec<'_>, alphabet: Alphabet) -> Step<()> {
        let states = exec.read_bits(2)? as usize + 1;
        let width = Transducer::state_width(states);
        let mut table = Vec::with_capacity(states);
        for _ in 0..states {
            let mut row = [(0, None); 2];
            for entry in &mut row {
                let next = exec.read_bits(width)? as usize;
                let out = exec.read_gamma(Some(alphabet.size() as u64 + 1))?;
                if next >= states {
                    return Err(Stop::Halted);
                }
                *entry = (next, (out >= 2).then(|| (out - 2) as u8));
            }
            table.push(row);
        }
        let mut state = 0;
        loop {
            let bit = exec.read_bit()? as usize;
            let (next, out) = table[state][bit];
            if let Some(s) = out {
                exec.emit(s)?;
            }
            state = next;
        }
    }
}

/// A prefix monotone machine over registered program families. A program is
/// the gamma code of a 1-based family index followed by the family payload.
/// Indices beyond the registered families halt with empty output.
///
/// Not universal: it dominates only what its families can express.
#[derive(Clone)]
pub struct ProgramFamilyMachine {
    alphabet: Alphabet,
    families: Vec<Arc<dyn ProgramFamily>>,
}

impl fmt::Debug for ProgramFamilyMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.families.iter().map(|fam| fam.name()).collect();
        f.debug_struct("ProgramFamilyMachine")
            .field("alphabet", &self.alphabet.size())
            .field("families", &names)
            .finish()
    }
}

impl Default for ProgramFamilyMachine {
    fn default() -> Self {
        Self::standard(Alphabet::BINARY)
    }
}

impl ProgramFamilyMachine {
    pub const PRINT: u64 = 1;
    pub const REPEAT: u64 = 2;
    pub const TRANSDUCER: u64 = 3;

    /// Machine with no families; every program halts with empty output.
    pub fn empty(alphabet: Alphabet) -> Self {
        ProgramFamilyMachine {
            alphabet,
            families: Vec::new(),
        }
    }

    /// Print, repeat and transducer families as indices 1, 2, 3.
    pub fn standard(alphabet: Alphabet) -> Self {
        Self::empty(alphabet)
            .register(Arc::new(PrintLiteral))
            .register(Arc::new(RepeatLiteral))
            .register(Arc::new(TransducerFamily))
    }

    /// Adds a family under the next free index.
    pub fn register(mut self, family: Arc<dyn ProgramFamily>) -> Self {
        self.families.push(family);
        self
    }

    pub fn families(&self) -> impl Iterator<Item = &str> {
        self.families.iter().map(|f| f.name())
    }

    /// Family index code followed by `payload`.
    pub fn program(&self, family: u64, payload: &[bool]) -> Result<Vec<bool>> {
        if family == 0 || family as usize > self.families.len() {
            return Err(Error::InvalidParameter(format!("no family {family}")));
        }
        let mut bits = gamma_encode(family);
        bits.extend_from_slice(payload);
        Ok(bits)
    }

    /// Program printing `x` and halting.
    pub fn encode_print(&self, x: &[u8]) -> Result<Vec<bool>> {
        self.program(Self::PRINT, &encode_literal_payload(x, self.alphabet)?)
    }

    /// Program printing `x` forever.
    pub fn encode_repeat(&self, x: &[u8]) -> Result<Vec<bool>> {
        self.program(Self::REPEAT, &encode_literal_payload(x, self.alphabet)?)
    }

    /// Program running `fst` on the bits of `input`.
    pub fn encode_transducer(&self, fst: &Transducer, input: &[bool]) -> Result<Vec<bool>> {
        let k = fst.states();
        if k == 0 || k > Transducer::MAX_STATES {
            return Err(Error::InvalidParameter(format!("transducer needs 1..=4 states, got {k}")));
        }
        let width = Transducer::state_width(k);
        let mut payload = vec![(k - 1) & 2 != 0, (k - 1) & 1 != 0];
        for row in &fst.table {
            for &(next, out) in row {
                if next >= k {
                    return Err(Error::InvalidParameter(format!("next state {next} ≥ {k}")));
                }
                payload.extend((0..width).rev().map(|i| (next >> i) & 1 == 1));
                let code = match out {
                    None => 1,
                    Some(s) if (s as usize) < self.alphabet.size() => s as u64 + 2,
                    Some(s) => {
                        return Err(Error::SymbolOutOfAlphabet {
                            symbol: s,
                            position: 0,
                            alphabet_size: self.alphabet.size(),
                        })
                    }
                };
                payload.extend(gamma_encode(code));
            }
        }
        payload.extend_from_slice(input);
        self.program(Self::TRANSDUCER, &payload)
    }
}

impl MonotoneMachine for ProgramFamilyMachine {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn execute(&self, exec: &mut Exec<'_>) -> Stop {
        let run = |exec: &mut Exec<'_>| -> Step<()> {
            let index = exec.read_gamma(Some(self.families.len() as u64))?;
            self.families[index as usize - 1].execute(exec, self.alphabet)
        };
        match run(exec) {
            Ok(()) => Stop::Halted,
            Err(stop) => stop,
        }
    }
}

/// Renders program bits as a `0`/`1` string.
pub fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parses a `0`/`1` string into program bits.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidParameter(format!("not a bit: {other:?}"))),
        })
        .collect()
}
