use std::borrow::Borrow;
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// A finite alphabet `{0, .., size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    size: usize,
}

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet { size: 2 };

    pub fn new(size: usize) -> Result<Self> {
        if !(2..=255).contains(&size) {
            return Err(Error::InvalidAlphabet(size));
        }
        Ok(Alphabet { size })
    }

    #[inline]
    pub fn size(self) -> usize {
        self.size
    }

    pub fn symbols(self) -> impl Iterator<Item = u8> {
        (0..self.size).map(|s| s as u8)
    }

    pub fn validate(self, symbols: &[u8]) -> Result<()> {
        match symbols.iter().position(|&s| s as usize >= self.size) {
            None => Ok(()),
            Some(position) => Err(Error::SymbolOutOfAlphabet {
                symbol: symbols[position],
                position,
                alphabet_size: self.size,
            }),
        }
    }

    /// Every string of exactly `len` symbols, in lexicographic order.
    pub fn strings_of_len(self, len: usize) -> impl Iterator<Item = Seq> {
        let count = self.size.pow(len as u32);
        let size = self.size;
        (0..count).map(move |mut code| {
            let mut symbols = vec![0u8; len];
            for slot in symbols.iter_mut().rev() {
                *slot = (code % size) as u8;
                code /= size;
            }
            Seq(symbols)
        })
    }

    /// Every string of length `0..=max_len`, shortest first.
    pub fn strings_up_to(self, max_len: usize) -> impl Iterator<Item = Seq> {
        (0..=max_len).flat_map(move |len| self.strings_of_len(len))
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::BINARY
    }
}

/// An owned finite sequence of symbol indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Seq(Vec<u8>);

impl Seq {
    pub fn empty() -> Self {
        Seq(Vec::new())
    }

    pub fn new(symbols: Vec<u8>) -> Self {
        Seq(symbols)
    }

    /// Parses a string of decimal digits, e.g. `"1011"`.
    pub fn parse(digits: &str) -> Result<Self> {
        digits
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidParameter(format!("not a symbol digit: {c:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Seq)
    }

    pub fn zeros(n: usize) -> Self {
        Seq(vec![0; n])
    }

    /// `x_{1:n}`.
    pub fn prefix(&self, n: usize) -> &[u8] {
        &self.0[..n]
    }

    pub fn push(&mut self, symbol: u8) {
        self.0.push(symbol);
    }

    pub fn extended(&self, symbol: u8) -> Seq {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(symbol);
        Seq(v)
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }

    pub fn count_of(&self, symbol: u8) -> usize {
        self.0.iter().filter(|&&s| s == symbol).count()
    }
}

impl Borrow<[u8]> for Seq {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl Deref for Seq {
    type Target = [u8];
    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl From<Vec<u8>> for Seq {
    fn from(v: Vec<u8>) -> Self {
        Seq(v)
    }
}

impl From<&[u8]> for Seq {
    fn from(v: &[u8]) -> Self {
        Seq(v.to_vec())
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seq({self})")
    }
}
