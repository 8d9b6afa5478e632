//! Alphabets and finite words over them.
//!
//! Words store symbol indices into an [`Alphabet`], so all combinatorics run
//! on small integers; rendering back to symbol names happens only at the
//! serialization boundary.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// An ordered finite symbol set. The ordering is total and fixed; it defines
/// the canonical (lexicographic) order on words of equal length.
///
/// Symbols may carry an integer label, used e.g. for signed alphabets where
/// negation of a word is meaningful.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    labels: Option<Vec<i64>>,
}

impl Alphabet {
    pub fn new(symbols: Vec<String>) -> Result<Alphabet> {
        Self::with_labels(symbols, None)
    }

    pub fn with_labels(symbols: Vec<String>, labels: Option<Vec<i64>>) -> Result<Alphabet> {
        if symbols.is_empty() {
            return Err(Error::InvalidSpec("alphabet must be nonempty".into()));
        }
        if symbols.len() > u8::MAX as usize {
            return Err(Error::InvalidSpec(format!(
                "alphabet too large ({} symbols, max {})",
                symbols.len(),
                u8::MAX
            )));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::InvalidSpec(format!("duplicate symbol {s:?}")));
            }
        }
        if let Some(ls) = &labels {
            if ls.len() != symbols.len() {
                return Err(Error::InvalidSpec(
                    "labels must match symbol count".into(),
                ));
            }
        }
        Ok(Alphabet { symbols, labels })
    }

    /// Alphabet `{0, 1, ..., k-1}` with the obvious names.
    pub fn digits(k: usize) -> Alphabet {
        Alphabet::new((0..k).map(|i| i.to_string()).collect()).expect("valid digit alphabet")
    }

    /// The binary alphabet `{0, 1}`.
    pub fn binary() -> Alphabet {
        Alphabet::digits(2)
    }

    /// Signed alphabet `{-n, ..., -1, 1, ..., n}` with matching labels.
    pub fn signed(n: usize) -> Result<Alphabet> {
        let mut symbols = Vec::with_capacity(2 * n);
        let mut labels = Vec::with_capacity(2 * n);
        for i in (1..=n).rev() {
            symbols.push(format!("-{i}"));
            labels.push(-(i as i64));
        }
        for i in 1..=n {
            symbols.push(i.to_string());
            labels.push(i as i64);
        }
        Alphabet::with_labels(symbols, Some(labels))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, index: u8) -> &str {
        &self.symbols[index as usize]
    }

    pub fn label(&self, index: u8) -> Option<i64> {
        self.labels.as_ref().map(|ls| ls[index as usize])
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn index_of(&self, symbol: &str) -> Result<u8> {
        self.symbols
            .iter()
            .position(|s| s == symbol)
            .map(|i| i as u8)
            .ok_or_else(|| Error::SymbolNotInAlphabet {
                symbol: symbol.to_string(),
            })
    }

    /// Index of the symbol with the given integer label, if labels are set.
    pub fn index_of_label(&self, label: i64) -> Option<u8> {
        self.labels
            .as_ref()
            .and_then(|ls| ls.iter().position(|&l| l == label))
            .map(|i| i as u8)
    }

    /// True when every symbol is a single character, so words can render as
    /// plain strings without separators.
    pub fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parse a word from its document form: either a plain string of
    /// single-character symbols or a pre-split list of symbol names.
    pub fn word_from_str(&self, s: &str) -> Result<Word> {
        if self.single_char() {
            let mut idx = Vec::with_capacity(s.len());
            for ch in s.chars() {
                idx.push(self.index_of(&ch.to_string())?);
            }
            Ok(Word::from_indices(idx))
        } else {
            Err(Error::Parse(format!(
                "alphabet has multi-character symbols; word {s:?} must be given as a symbol list"
            )))
        }
    }

    pub fn word_from_symbols(&self, symbols: &[String]) -> Result<Word> {
        let mut idx = Vec::with_capacity(symbols.len());
        for s in symbols {
            idx.push(self.index_of(s)?);
        }
        Ok(Word::from_indices(idx))
    }

    /// Render a word as a display string: concatenated when all symbols are
    /// single characters, comma-joined otherwise.
    pub fn render(&self, w: &Word) -> String {
        if self.single_char() {
            w.indices().iter().map(|&i| self.symbol(i)).collect()
        } else {
            w.indices()
                .iter()
                .map(|&i| self.symbol(i))
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// Check that every index of `w` is valid for this alphabet.
    pub fn validate_word(&self, w: &Word) -> Result<()> {
        for &i in w.indices() {
            if i as usize >= self.len() {
                return Err(Error::SymbolIndexOutOfRange {
                    index: i as usize,
                    size: self.len(),
                });
            }
        }
        Ok(())
    }
}

/// A finite word: a sequence of symbol indices. The empty word is allowed.
///
/// `Ord` is plain lexicographic on indices; for the canonical order used
/// throughout (shorter first, then lexicographic) see [`Word::canonical_cmp`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn from_indices(indices: Vec<u8>) -> Word {
        Word(indices)
    }

    /// All-`index` word of the given length (e.g. the all-zero word).
    pub fn repeated(index: u8, len: usize) -> Word {
        Word(vec![index; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[u8] {
        &self.0
    }

    pub fn push(&mut self, index: u8) {
        self.0.push(index);
    }

    pub fn pop(&mut self) {
        self.0.pop();
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Subword on positions `[start, end)`.
    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn ends_with(&self, suffix: &Word) -> bool {
        self.0.ends_with(&suffix.0)
    }

    /// Positions where `pattern` occurs as a subword (may overlap).
    pub fn occurrences(&self, pattern: &Word) -> Vec<usize> {
        if pattern.is_empty() || pattern.len() > self.len() {
            return Vec::new();
        }
        (0..=self.len() - pattern.len())
            .filter(|&i| self.0[i..i + pattern.len()] == pattern.0[..])
            .collect()
    }

    pub fn contains_subword(&self, pattern: &Word) -> bool {
        !self.occurrences(pattern).is_empty()
    }

    /// Greedy leftmost count of pairwise disjoint occurrences of `pattern`.
    pub fn disjoint_occurrences(&self, pattern: &Word) -> usize {
        if pattern.is_empty() {
            return 0;
        }
        let mut count = 0;
        let mut i = 0;
        while i + pattern.len() <= self.len() {
            if self.0[i..i + pattern.len()] == pattern.0[..] {
                count += 1;
                i += pattern.len();
            } else {
                i += 1;
            }
        }
        count
    }

    /// Hamming distance; defined only for equal lengths.
    pub fn hamming(&self, other: &Word) -> usize {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(other.0.iter())
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    /// `self` repeated `k` times.
    pub fn repeat(&self, k: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            v.extend_from_slice(&self.0);
        }
        Word(v)
    }

    /// Canonical order: by length first, then lexicographically by indices.
    pub fn canonical_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word[")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_duplicates() {
        assert!(Alphabet::new(vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn signed_alphabet_labels() {
        let a = Alphabet::signed(3).unwrap();
        assert_eq!(a.len(), 6);
        assert_eq!(a.symbols()[0], "-3");
        assert_eq!(a.label(0), Some(-3));
        assert_eq!(a.index_of_label(1), Some(3));
        assert_eq!(a.index_of_label(-1), Some(2));
    }

    #[test]
    fn word_round_trip_rendering() {
        let a = Alphabet::binary();
        let w = a.word_from_str("0110").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(a.render(&w), "0110");
        assert!(a.word_from_str("012").is_err());
    }

    #[test]
    fn disjoint_occurrence_counting_is_greedy_leftmost() {
        let a = Alphabet::binary();
        let w = a.word_from_str("110110110").unwrap();
        let p = a.word_from_str("11").unwrap();
        assert_eq!(w.disjoint_occurrences(&p), 3);
        let q = a.word_from_str("101").unwrap();
        let v = a.word_from_str("10101").unwrap();
        assert_eq!(v.occurrences(&q), vec![0, 2]);
        assert_eq!(v.disjoint_occurrences(&q), 1);
    }

    #[test]
    fn canonical_order_is_length_then_lex() {
        let a = Alphabet::binary();
        let w1 = a.word_from_str("1").unwrap();
        let w01 = a.word_from_str("01").unwrap();
        assert_eq!(w1.canonical_cmp(&w01), std::cmp::Ordering::Less);
        let w10 = a.word_from_str("10").unwrap();
        assert_eq!(w01.canonical_cmp(&w10), std::cmp::Ordering::Less);
    }
}
