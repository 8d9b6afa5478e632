//! Language enumeration and counting: depth-first extension with per-prefix
//! pruning by the membership oracle, canonical (lexicographic) output order,
//! and deterministic parallel splitting over first-symbol classes.

use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::shift::{Shift, ShiftKind, Walk};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// The words of one length, with certain/possible counts for horizon-limited
/// oracles.
#[derive(Clone, Debug)]
pub struct LanguageSlice {
    n: usize,
    words: Vec<Word>,
    certain: u128,
    possible: Option<u128>,
    approximate: bool,
}

impl LanguageSlice {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Members decided `In`, in lexicographic order.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn count_certain(&self) -> u128 {
        self.certain
    }

    /// Upper count including undecided words; equals `count_certain` for
    /// exact oracles.
    pub fn count_possible(&self) -> u128 {
        self.possible.unwrap_or(self.certain)
    }

    /// True when the oracle is horizon-limited and the word list is only a
    /// lower approximation of the language.
    pub fn approximate(&self) -> bool {
        self.approximate
    }
}

/// Count of one length without materializing words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CountResult {
    pub certain: u128,
    pub possible: u128,
    pub approximate: bool,
}

fn check_budget(shift: &Shift, n: usize) -> Result<()> {
    shift.require_depth(n)
}

/// Enumerate `L_n(X)`: exactly the length-n words with membership `In`, in
/// lexicographic order.
pub fn enumerate(shift: &Shift, n: usize) -> Result<LanguageSlice> {
    check_budget(shift, n)?;
    let approximate = !shift.is_exact();
    if n == 0 {
        let nonempty = !shift.is_empty_shift();
        return Ok(LanguageSlice {
            n,
            words: if nonempty { vec![Word::empty()] } else { vec![] },
            certain: nonempty as u128,
            possible: None,
            approximate,
        });
    }
    let words = match shift.walk_init() {
        None => Vec::new(),
        Some(root) => {
            let n_sym = shift.alphabet().len() as u8;
            if n >= 8 && rayon::current_num_threads() > 1 {
                let firsts: Vec<(u8, Walk)> = (0..n_sym)
                    .filter_map(|a| shift.walk_push(&root, 0, a).map(|st| (a, st)))
                    .collect();
                let parts: Vec<Vec<Word>> = firsts
                    .par_iter()
                    .map(|(a, st)| {
                        let mut buf = Word::from_indices(vec![*a]);
                        let mut out = Vec::new();
                        dfs_collect(shift, st, &mut buf, n, &mut out);
                        out
                    })
                    .collect();
                parts.into_iter().flatten().collect()
            } else {
                let mut out = Vec::new();
                let mut buf = Word::empty();
                dfs_from_root(shift, &root, &mut buf, n, &mut out);
                out
            }
        }
    };
    let certain = words.len() as u128;
    let possible = possible_count(shift, n, certain);
    Ok(LanguageSlice {
        n,
        words,
        certain,
        possible,
        approximate,
    })
}

fn dfs_from_root(shift: &Shift, root: &Walk, buf: &mut Word, n: usize, out: &mut Vec<Word>) {
    for a in 0..shift.alphabet().len() as u8 {
        buf.push(a);
        if let Some(st) = shift.walk_push(root, 0, a) {
            dfs_collect(shift, &st, buf, n, out);
        }
        buf.pop();
    }
}

fn dfs_collect(shift: &Shift, walk: &Walk, buf: &mut Word, n: usize, out: &mut Vec<Word>) {
    if buf.len() == n {
        if shift.walk_accepts(walk, n) {
            out.push(buf.clone());
        }
        return;
    }
    let pos = buf.len();
    for a in 0..shift.alphabet().len() as u8 {
        buf.push(a);
        if let Some(st) = shift.walk_push(walk, pos, a) {
            dfs_collect(shift, &st, buf, n, out);
        }
        buf.pop();
    }
}

/// Count `|L_n(X)|` without materializing the words.
pub fn count_words(shift: &Shift, n: usize) -> Result<CountResult> {
    check_budget(shift, n)?;
    let approximate = !shift.is_exact();
    if n == 0 {
        let c = !shift.is_empty_shift() as u128;
        return Ok(CountResult {
            certain: c,
            possible: possible_count(shift, 0, c).unwrap_or(c),
            approximate,
        });
    }
    let certain = match shift.walk_init() {
        None => 0,
        Some(root) => {
            let n_sym = shift.alphabet().len() as u8;
            if n >= 8 && rayon::current_num_threads() > 1 {
                let firsts: Vec<(u8, Walk)> = (0..n_sym)
                    .filter_map(|a| shift.walk_push(&root, 0, a).map(|st| (a, st)))
                    .collect();
                firsts
                    .par_iter()
                    .map(|(a, st)| {
                        let mut buf = Word::from_indices(vec![*a]);
                        dfs_count(shift, st, &mut buf, n)
                    })
                    .sum()
            } else {
                let mut buf = Word::empty();
                let mut total = 0u128;
                for a in 0..n_sym {
                    buf.push(a);
                    if let Some(st) = shift.walk_push(&root, 0, a) {
                        total += dfs_count(shift, &st, &mut buf, n);
                    }
                    buf.pop();
                }
                total
            }
        }
    };
    Ok(CountResult {
        certain,
        possible: possible_count(shift, n, certain).unwrap_or(certain),
        approximate,
    })
}

fn dfs_count(shift: &Shift, walk: &Walk, buf: &mut Word, n: usize) -> u128 {
    if buf.len() == n {
        return shift.walk_accepts(walk, n) as u128;
    }
    let pos = buf.len();
    let mut total = 0u128;
    for a in 0..shift.alphabet().len() as u8 {
        buf.push(a);
        if let Some(st) = shift.walk_push(walk, pos, a) {
            total += dfs_count(shift, &st, buf, n);
        }
        buf.pop();
    }
    total
}

/// Upper count for horizon-limited oracles: words not provably out. Uses the
/// structural side-oracle when the coded shift has one, else the trivial
/// `|A|^n` bound. `None` for exact oracles.
fn possible_count(shift: &Shift, n: usize, certain: u128) -> Option<u128> {
    if shift.is_exact() {
        return None;
    }
    match shift.kind() {
        ShiftKind::Coded(c) => {
            if let Some(upper) = c.upper() {
                let mut count = 0u128;
                fn rec(
                    upper: &crate::shift::SignStructure,
                    n_sym: u8,
                    prev: i8,
                    depth: usize,
                    n: usize,
                    count: &mut u128,
                ) {
                    if depth == n {
                        *count += 1;
                        return;
                    }
                    for a in 0..n_sym {
                        if let Some(s) = upper.walk_push(prev, a) {
                            rec(upper, n_sym, s, depth + 1, n, count);
                        }
                    }
                }
                rec(upper, shift.alphabet().len() as u8, 0, 0, n, &mut count);
                Some(count.max(certain))
            } else {
                Some((shift.alphabet().len() as u128).pow(n as u32))
            }
        }
        _ => Some((shift.alphabet().len() as u128).pow(n as u32)),
    }
}

/// Visit `L_n` lazily in lexicographic order; the visitor returns `false` to
/// stop early. Returns whether the walk ran to completion.
pub fn visit_words(shift: &Shift, n: usize, f: &mut dyn FnMut(&Word) -> bool) -> Result<bool> {
    check_budget(shift, n)?;
    if n == 0 {
        if !shift.is_empty_shift() {
            return Ok(f(&Word::empty()));
        }
        return Ok(true);
    }
    let Some(root) = shift.walk_init() else {
        return Ok(true);
    };
    let mut buf = Word::empty();
    Ok(visit_rec(shift, &root, &mut buf, n, f))
}

fn visit_rec(
    shift: &Shift,
    walk: &Walk,
    buf: &mut Word,
    n: usize,
    f: &mut dyn FnMut(&Word) -> bool,
) -> bool {
    if buf.len() == n {
        if shift.walk_accepts(walk, n) {
            return f(buf);
        }
        return true;
    }
    let pos = buf.len();
    for a in 0..shift.alphabet().len() as u8 {
        buf.push(a);
        let keep = match shift.walk_push(walk, pos, a) {
            Some(st) => visit_rec(shift, &st, buf, n, f),
            None => true,
        };
        buf.pop();
        if !keep {
            return false;
        }
    }
    true
}

/// All nonempty words of length 1..=max, in canonical (length, lex) order.
pub fn words_through(shift: &Shift, max: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for n in 1..=max {
        out.extend(enumerate(shift, n)?.words.iter().cloned());
    }
    Ok(out)
}

/// A source of per-length word sets: either a materialized collection or a
/// shift oracle.
pub trait LanguageSource {
    fn alphabet(&self) -> &Alphabet;
    /// Exact membership; `Unknown` counts as false.
    fn member(&self, w: &Word) -> bool;
    /// Visit the length-n set in lexicographic order; visitor returns false
    /// to stop. Errors when the length is not available.
    fn visit(&self, n: usize, f: &mut dyn FnMut(&Word) -> bool) -> Result<()>;
    /// Greatest length with materialized data, `None` for oracle-backed
    /// sources.
    fn max_materialized(&self) -> Option<usize>;
}

impl LanguageSource for Shift {
    fn alphabet(&self) -> &Alphabet {
        Shift::alphabet(self)
    }

    fn member(&self, w: &Word) -> bool {
        self.is_in(w)
    }

    fn visit(&self, n: usize, f: &mut dyn FnMut(&Word) -> bool) -> Result<()> {
        visit_words(self, n, f).map(|_| ())
    }

    fn max_materialized(&self) -> Option<usize> {
        match self.kind() {
            ShiftKind::Factor(fo) => Some(fo.budget()),
            _ => None,
        }
    }
}

/// An explicit per-length word collection, optionally flagged factorial.
#[derive(Clone, Debug)]
pub struct WordCollection {
    alphabet: Alphabet,
    by_len: BTreeMap<usize, Vec<Word>>,
    factorial: bool,
}

impl WordCollection {
    pub fn new(alphabet: Alphabet, factorial: bool) -> WordCollection {
        WordCollection {
            alphabet,
            by_len: BTreeMap::new(),
            factorial,
        }
    }

    pub fn from_words<I: IntoIterator<Item = Word>>(
        alphabet: Alphabet,
        words: I,
        factorial: bool,
    ) -> Result<WordCollection> {
        let mut c = WordCollection::new(alphabet, factorial);
        for w in words {
            c.insert(w)?;
        }
        c.sort_dedup();
        Ok(c)
    }

    /// Close the given words under subwords and collect the result.
    pub fn factorial_closure<I: IntoIterator<Item = Word>>(
        alphabet: Alphabet,
        words: I,
    ) -> Result<WordCollection> {
        let mut c = WordCollection::new(alphabet, true);
        for w in words {
            for start in 0..w.len() {
                for end in (start + 1)..=w.len() {
                    c.insert(w.subword(start, end))?;
                }
            }
        }
        c.insert(Word::empty())?;
        c.sort_dedup();
        Ok(c)
    }

    pub fn insert(&mut self, w: Word) -> Result<()> {
        self.alphabet.validate_word(&w)?;
        self.by_len.entry(w.len()).or_default().push(w);
        Ok(())
    }

    pub fn sort_dedup(&mut self) {
        for v in self.by_len.values_mut() {
            v.sort();
            v.dedup();
        }
    }

    pub fn lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_len.keys().copied()
    }

    pub fn at(&self, n: usize) -> &[Word] {
        self.by_len.get(&n).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn factorial_flag(&self) -> bool {
        self.factorial
    }

    /// Exhaustive factoriality check: every subword of every member is a
    /// member (requires the shorter lengths to be materialized).
    pub fn verify_factorial(&self) -> bool {
        for words in self.by_len.values() {
            for w in words {
                for start in 0..w.len() {
                    for end in (start + 1)..=w.len() {
                        if (start, end) == (0, w.len()) {
                            continue;
                        }
                        let sub = w.subword(start, end);
                        if !self.member(&sub) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Submultiplicativity audit: `|D_{m+n}| <= |D_m| * |D_n|` for all
    /// materialized m, n with m+n materialized.
    pub fn verify_submultiplicative(&self) -> bool {
        let lens: Vec<usize> = self.lengths().filter(|&n| n > 0).collect();
        for &m in &lens {
            for &n in &lens {
                if let Some(sum) = self.by_len.get(&(m + n)) {
                    if (sum.len() as u128) > (self.at(m).len() as u128) * (self.at(n).len() as u128)
                    {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl LanguageSource for WordCollection {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn member(&self, w: &Word) -> bool {
        self.by_len
            .get(&w.len())
            .is_some_and(|v| v.binary_search(w).is_ok())
    }

    fn visit(&self, n: usize, f: &mut dyn FnMut(&Word) -> bool) -> Result<()> {
        let Some(words) = self.by_len.get(&n) else {
            return Err(Error::InsufficientDepth {
                needed: n,
                have: self.by_len.keys().last().copied().unwrap_or(0),
            });
        };
        for w in words {
            if !f(w) {
                break;
            }
        }
        Ok(())
    }

    fn max_materialized(&self) -> Option<usize> {
        Some(self.by_len.keys().last().copied().unwrap_or(0))
    }
}

/// The biextendable core `{w in D_n : exists u,v in D_{kn} with uwv in D}`.
///
/// The pair search runs in canonical order with early exit, so biextendable
/// words (the common case) cost one membership probe.
pub fn extendable_core(source: &dyn LanguageSource, n: usize, k: usize) -> Result<Vec<Word>> {
    let j = k
        .checked_mul(n)
        .ok_or_else(|| Error::InvalidSpec("k*n overflows".into()))?;
    if let Some(depth) = source.max_materialized() {
        let needed = n + 2 * j;
        if needed > depth {
            return Err(Error::InsufficientDepth {
                needed,
                have: depth,
            });
        }
    }
    let mut members_n: Vec<Word> = Vec::new();
    source.visit(n, &mut |w| {
        members_n.push(w.clone());
        true
    })?;
    if k == 0 {
        return Ok(members_n);
    }
    let mut out = Vec::new();
    for w in members_n {
        let mut found = false;
        source.visit(j, &mut |u| {
            let uw = u.concat(&w);
            let mut stop = false;
            source
                .visit(j, &mut |v| {
                    if source.member(&uw.concat(v)) {
                        stop = true;
                        return false;
                    }
                    true
                })
                .ok();
            if stop {
                found = true;
                return false;
            }
            true
        })?;
        if found {
            out.push(w);
        }
    }
    Ok(out)
}

/// Cores for `k = 1..`, stopping when two consecutive cores agree (the
/// stabilization index) or `k_max` is reached.
pub struct CoreChain {
    pub n: usize,
    /// `(k, core words)` for each computed k.
    pub cores: Vec<(usize, Vec<Word>)>,
    /// First k with core(k) == core(k+1), when found within `k_max`.
    pub stabilized_at: Option<usize>,
}

pub fn extendable_core_chain(
    source: &dyn LanguageSource,
    n: usize,
    k_max: usize,
) -> Result<CoreChain> {
    let mut cores: Vec<(usize, Vec<Word>)> = Vec::new();
    let mut stabilized_at = None;
    for k in 1..=k_max {
        let core = extendable_core(source, n, k)?;
        if let Some((_, prev)) = cores.last() {
            if *prev == core {
                stabilized_at = Some(k - 1);
                cores.push((k, core));
                break;
            }
        }
        cores.push((k, core));
    }
    Ok(CoreChain {
        n,
        cores,
        stabilized_at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::{make_shift, ShiftSpec};

    fn golden() -> Shift {
        let a = Alphabet::binary();
        make_shift(ShiftSpec::Sft {
            alphabet: a.clone(),
            forbidden: vec![a.word_from_str("11").unwrap()],
        })
        .unwrap()
    }

    #[test]
    fn full_shift_counts() {
        let s = make_shift(ShiftSpec::Full {
            alphabet: Alphabet::binary(),
        })
        .unwrap();
        assert_eq!(enumerate(&s, 3).unwrap().count_certain(), 8);
    }

    #[test]
    fn golden_mean_is_fibonacci() {
        // oracle: |L_n| satisfies f(n) = f(n-1) + f(n-2), f(1)=2, f(2)=3
        let s = golden();
        let mut a = 2u128;
        let mut b = 3u128;
        assert_eq!(count_words(&s, 1).unwrap().certain, a);
        assert_eq!(count_words(&s, 2).unwrap().certain, b);
        for n in 3..=14 {
            let c = a + b;
            assert_eq!(count_words(&s, n).unwrap().certain, c, "n={n}");
            a = b;
            b = c;
        }
        assert_eq!(count_words(&s, 10).unwrap().certain, 144);
    }

    #[test]
    fn at_most_one_one_counts() {
        let s = make_shift(ShiftSpec::AtMostOneOne).unwrap();
        assert_eq!(enumerate(&s, 5).unwrap().count_certain(), 6);
    }

    #[test]
    fn enumeration_is_lexicographic_and_deterministic() {
        let s = golden();
        let l = enumerate(&s, 4).unwrap();
        let rendered: Vec<String> = l.words().iter().map(|w| s.alphabet().render(w)).collect();
        let mut sorted = rendered.clone();
        sorted.sort();
        assert_eq!(rendered, sorted);
        assert_eq!(rendered.first().map(|s| s.as_str()), Some("0000"));
        // run again; byte-identical
        let l2 = enumerate(&s, 4).unwrap();
        assert_eq!(l.words(), l2.words());
    }

    #[test]
    fn empty_word_membership() {
        let s = golden();
        assert_eq!(enumerate(&s, 0).unwrap().count_certain(), 1);
    }

    #[test]
    fn core_of_language_is_whole_slice() {
        let s = golden();
        let core = extendable_core(&s, 4, 2).unwrap();
        assert_eq!(core, enumerate(&s, 4).unwrap().words());
    }

    #[test]
    fn core_chain_stabilizes_immediately_for_languages() {
        let s = golden();
        let chain = extendable_core_chain(&s, 3, 3).unwrap();
        assert_eq!(chain.stabilized_at, Some(1));
        // nested: each core contains the next
        for pair in chain.cores.windows(2) {
            let (_, a) = &pair[0];
            let (_, b) = &pair[1];
            assert!(b.iter().all(|w| a.contains(w)));
        }
    }

    #[test]
    fn core_of_bounded_one_collection_extends_by_zeros() {
        // global at-most-one-1 words materialized to length 9: every member
        // of D_3 extends by all-zero words on both sides
        let a = Alphabet::binary();
        let shift = crate::shift::make_shift(crate::shift::ShiftSpec::AtMostOneOne).unwrap();
        let mut words = Vec::new();
        for n in 1..=9 {
            words.extend(enumerate(&shift, n).unwrap().words().to_vec());
        }
        let d = WordCollection::from_words(a, words, true).unwrap();
        let core = extendable_core(&d, 3, 1).unwrap();
        assert_eq!(core, d.at(3));
        assert_eq!(core.len(), 4);
    }

    #[test]
    fn core_shrinks_for_non_extendable_collections() {
        // factorial closure of 0001: the word 1 has no right-extension with
        // a further 1, so cores at n=1 drop it
        let a = Alphabet::binary();
        let d = WordCollection::factorial_closure(
            a.clone(),
            vec![a.word_from_str("0001").unwrap()],
        )
        .unwrap();
        let core1 = extendable_core(&d, 1, 1).unwrap();
        assert_eq!(core1, vec![a.word_from_str("0").unwrap()]);
    }

    #[test]
    fn insufficient_depth_is_reported() {
        let a = Alphabet::binary();
        let d = WordCollection::factorial_closure(
            a.clone(),
            vec![a.word_from_str("0001").unwrap()],
        )
        .unwrap();
        // n=2, k=2 needs length 10; only 4 materialized
        match extendable_core(&d, 2, 2) {
            Err(Error::InsufficientDepth { needed: 10, have: 4 }) => {}
            other => panic!("expected depth error, got {other:?}"),
        }
    }

    #[test]
    fn collection_checks() {
        let a = Alphabet::binary();
        let d = WordCollection::factorial_closure(
            a.clone(),
            vec![a.word_from_str("0101").unwrap(), a.word_from_str("0011").unwrap()],
        )
        .unwrap();
        assert!(d.verify_factorial());
        assert!(d.verify_submultiplicative());
        let bad = WordCollection::from_words(
            a.clone(),
            vec![a.word_from_str("01").unwrap()],
            true,
        )
        .unwrap();
        assert!(!bad.verify_factorial());
    }
}
