//! Finite words over the generator alphabet and the rules that produce
//! trajectory prefixes and candidate word pools.
//!
//! Symbols are stored zero-based (`0..m`); `Display` prints them one-based.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    symbols: Vec<usize>,
}

impl Word {
    /// Builds a word from zero-based symbols, each below `m`.
    pub fn new(symbols: Vec<usize>, m: usize) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidWord("empty word".into()));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= m) {
            return Err(Error::InvalidWord(format!("symbol {} out of range 1..={m}", s + 1)));
        }
        Ok(Word { symbols })
    }

    /// Builds a word from one-based symbols, as written in the literature.
    pub fn from_one_based(symbols: &[usize], m: usize) -> Result<Self> {
        if symbols.contains(&0) {
            return Err(Error::InvalidWord("symbol 0 in a one-based word".into()));
        }
        Word::new(symbols.iter().map(|s| s - 1).collect(), m)
    }

    pub fn constant(symbol: usize, n: usize) -> Self {
        assert!(n >= 1);
        Word { symbols: vec![symbol; n] }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn prefix(&self, n: usize) -> Result<Word> {
        if n == 0 || n > self.len() {
            return Err(Error::InvalidWord(format!("prefix length {n} of a length-{} word", self.len())));
        }
        Ok(Word { symbols: self.symbols[..n].to_vec() })
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.symbols.starts_with(&self.symbols)
    }

    /// Relabels symbols through `perm` (`new = perm[old]`).
    pub fn permuted(&self, perm: &[usize]) -> Word {
        Word { symbols: self.symbols.iter().map(|&s| perm[s]).collect() }
    }

    /// Occurrence count of each symbol.
    pub fn counts(&self, m: usize) -> Vec<usize> {
        let mut c = vec![0; m];
        for &s in &self.symbols {
            c[s] += 1;
        }
        c
    }

    /// All `m^n` words of length `n` in lexicographic order.
    pub fn all(m: usize, n: usize, cap: usize) -> Result<Vec<Word>> {
        let total = checked_pow(m, n).filter(|&t| t <= cap).ok_or(Error::DepthTooLarge { m, n, cap })?;
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut symbols = vec![0; n];
            for slot in symbols.iter_mut().rev() {
                *slot = idx % m;
                idx /= m;
            }
            out.push(Word { symbols });
        }
        Ok(out)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.symbols.iter().map(|s| (s + 1).to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub(crate) fn checked_pow(m: usize, n: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc.checked_mul(m)?;
    }
    Some(acc)
}

/// Rule generating the prefix `ω|_n` of an infinite trajectory for every `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WordRule {
    /// `(j, j, j, ...)`
    Constant(usize),
    /// The given block repeated forever.
    Periodic(Vec<usize>),
    /// A fixed finite prefix; depths beyond it are errors.
    Explicit(Vec<usize>),
}

impl WordRule {
    pub fn prefix(&self, n: usize, m: usize) -> Result<Word> {
        if n == 0 {
            return Err(Error::InvalidWord("depth 0".into()));
        }
        let symbols = match self {
            WordRule::Constant(j) => vec![*j; n],
            WordRule::Periodic(block) => {
                if block.is_empty() {
                    return Err(Error::InvalidWord("empty period".into()));
                }
                (0..n).map(|k| block[k % block.len()]).collect()
            }
            WordRule::Explicit(prefix) => {
                if prefix.len() < n {
                    return Err(Error::ExhaustedPrefix);
                }
                prefix[..n].to_vec()
            }
        };
        Word::new(symbols, m)
    }

    /// The rule of `σω`.
    pub fn shifted(&self) -> WordRule {
        match self {
            WordRule::Constant(j) => WordRule::Constant(*j),
            WordRule::Periodic(block) => {
                let mut b = block.clone();
                b.rotate_left(1);
                WordRule::Periodic(b)
            }
            WordRule::Explicit(p) => WordRule::Explicit(p.iter().skip(1).copied().collect()),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> WordRule {
        match self {
            WordRule::Constant(j) => WordRule::Constant(perm[*j]),
            WordRule::Periodic(b) => WordRule::Periodic(b.iter().map(|&s| perm[s]).collect()),
            WordRule::Explicit(b) => WordRule::Explicit(b.iter().map(|&s| perm[s]).collect()),
        }
    }
}

impl fmt::Display for WordRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |b: &[usize]| b.iter().map(|s| (s + 1).to_string()).collect::<Vec<_>>().join("");
        match self {
            WordRule::Constant(j) => write!(f, "({})^inf", j + 1),
            WordRule::Periodic(b) => write!(f, "({})^inf", join(b)),
            WordRule::Explicit(b) => write!(f, "[{}]", join(b)),
        }
    }
}

/// Candidate words used by amalgamated and local-entropy searches: all
/// constant words, all period-2 words and `random` seeded random words.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordPool {
    pub constant: bool,
    pub period2: bool,
    pub random: usize,
    pub seed: u64,
    /// Optional relabeling applied to every generated word; used to carry a
    /// pool across a generator permutation.
    #[serde(default)]
    pub relabel: Option<Vec<usize>>,
}

impl Default for WordPool {
    fn default() -> Self {
        WordPool { constant: true, period2: true, random: 32, seed: 0, relabel: None }
    }
}

impl WordPool {
    pub fn with_seed(seed: u64) -> Self {
        WordPool { seed, ..Default::default() }
    }

    /// Deduplicated, sorted pool of words of length `n` over `m` symbols.
    pub fn words(&self, m: usize, n: usize) -> Vec<Word> {
        let mut out = Vec::new();
        if self.constant {
            out.extend((0..m).map(|j| Word::constant(j, n)));
        }
        if self.period2 {
            for a in 0..m {
                for b in 0..m {
                    if a != b {
                        out.push(Word { symbols: (0..n).map(|k| if k % 2 == 0 { a } else { b }).collect() });
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ ((n as u64) << 32) ^ (m as u64));
        for _ in 0..self.random {
            out.push(Word { symbols: (0..n).map(|_| rng.gen_range(0..m)).collect() });
        }
        if let Some(perm) = &self.relabel {
            out = out.iter().map(|w| w.permuted(perm)).collect();
        }
        out.sort();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_and_empty() {
        assert!(Word::new(vec![], 2).is_err());
        assert!(Word::new(vec![0, 2], 2).is_err());
        assert!(Word::from_one_based(&[0], 2).is_err());
        assert_eq!(Word::from_one_based(&[1, 2], 2).unwrap().symbols(), &[0, 1]);
    }

    #[test]
    fn enumerates_all_words_in_order() {
        let ws = Word::all(2, 3, 4096).unwrap();
        assert_eq!(ws.len(), 8);
        assert_eq!(ws[0].symbols(), &[0, 0, 0]);
        assert_eq!(ws[5].symbols(), &[1, 0, 1]);
        assert!(matches!(Word::all(2, 13, 4096), Err(Error::DepthTooLarge { .. })));
    }

    #[test]
    fn rules_and_shift() {
        let r = WordRule::Periodic(vec![0, 1]);
        assert_eq!(r.prefix(5, 2).unwrap().symbols(), &[0, 1, 0, 1, 0]);
        assert_eq!(r.shifted().prefix(3, 2).unwrap().symbols(), &[1, 0, 1]);
        assert_eq!(WordRule::Explicit(vec![0]).prefix(2, 2), Err(Error::ExhaustedPrefix));
        assert_eq!(format!("{}", Word::from_one_based(&[1, 2], 2).unwrap()), "(1,2)");
    }

    #[test]
    fn pool_is_deterministic_and_contains_structured_words() {
        let p = WordPool::with_seed(7);
        let a = p.words(2, 6);
        assert_eq!(a, p.words(2, 6));
        assert!(a.contains(&Word::constant(1, 6)));
        assert!(a.contains(&Word::new(vec![1, 0, 1, 0, 1, 0], 2).unwrap()));
    }
}
