//! Products over pair alphabets and sliding-block-code factors.

use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::shift::{Membership, Shift};
use std::collections::{BTreeMap, HashSet};

/// Pair alphabet for products: symbol `(a,b)` at index `i*|B| + j`.
pub(crate) fn pair_alphabet(left: &Alphabet, right: &Alphabet) -> Result<Alphabet> {
    let mut symbols = Vec::with_capacity(left.len() * right.len());
    for a in left.symbols() {
        for b in right.symbols() {
            symbols.push(format!("({a},{b})"));
        }
    }
    Alphabet::new(symbols)
}

pub(crate) fn split_pair_symbol(
    _pair: &Alphabet,
    _left: &Alphabet,
    right: &Alphabet,
    sym: u8,
) -> (u8, u8) {
    let n = right.len() as u8;
    (sym / n, sym % n)
}

pub(crate) fn project_pair_word(
    pair: &Alphabet,
    left: &Alphabet,
    right: &Alphabet,
    w: &Word,
) -> (Word, Word) {
    let mut wl = Vec::with_capacity(w.len());
    let mut wr = Vec::with_capacity(w.len());
    for &s in w.indices() {
        let (a, b) = split_pair_symbol(pair, left, right, s);
        wl.push(a);
        wr.push(b);
    }
    (Word::from_indices(wl), Word::from_indices(wr))
}

#[cfg(test)]
pub(crate) fn join_pair_word(right_len: usize, wl: &Word, wr: &Word) -> Word {
    debug_assert_eq!(wl.len(), wr.len());
    Word::from_indices(
        wl.indices()
            .iter()
            .zip(wr.indices())
            .map(|(&a, &b)| a * right_len as u8 + b)
            .collect(),
    )
}

/// A sliding block code of radius `r`: a total table from base windows of
/// length `2r+1` to target symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMap {
    radius: usize,
    table: BTreeMap<Word, u8>,
    target: Alphabet,
}

impl BlockMap {
    /// Build from (window, target symbol name) pairs. The target alphabet is
    /// the lexicographically sorted set of range symbols.
    pub fn new(radius: usize, entries: Vec<(Word, String)>) -> Result<BlockMap> {
        let mut names: Vec<String> = entries.iter().map(|(_, t)| t.clone()).collect();
        names.sort();
        names.dedup();
        let target = Alphabet::new(names)?;
        let mut table = BTreeMap::new();
        for (w, t) in entries {
            let idx = target.index_of(&t)?;
            if let Some(prev) = table.insert(w.clone(), idx) {
                if prev != idx {
                    return Err(Error::InvalidSpec(
                        "block map has conflicting entries for one window".into(),
                    ));
                }
            }
        }
        Ok(BlockMap { radius, table, target })
    }

    /// Letter-to-letter map (radius 0) given per-symbol images.
    pub fn letter_map(base: &Alphabet, images: Vec<String>) -> Result<BlockMap> {
        if images.len() != base.len() {
            return Err(Error::InvalidSpec(
                "letter map must cover every base symbol".into(),
            ));
        }
        let entries = images
            .into_iter()
            .enumerate()
            .map(|(i, t)| (Word::from_indices(vec![i as u8]), t))
            .collect();
        BlockMap::new(0, entries)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn table(&self) -> &BTreeMap<Word, u8> {
        &self.table
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    /// Apply to a base word: the image has length `len - 2r` (empty when the
    /// word is shorter than a window).
    pub fn apply(&self, w: &Word) -> Result<Word> {
        let win = 2 * self.radius + 1;
        if w.len() < win {
            return Ok(Word::empty());
        }
        let mut out = Vec::with_capacity(w.len() - 2 * self.radius);
        for i in 0..=(w.len() - win) {
            let window = w.subword(i, i + win);
            let t = self.table.get(&window).ok_or_else(|| {
                Error::InvalidSpec("block map is not total on the base language".into())
            })?;
            out.push(*t);
        }
        Ok(Word::from_indices(out))
    }
}

/// Factor oracle: image languages materialized by direct image of the base
/// language up to a length budget; membership is a set lookup.
pub struct FactorOracle {
    base: Box<Shift>,
    map: BlockMap,
    budget: usize,
    /// images[n] = set of byte strings of the image language at length n
    images: Vec<HashSet<Vec<u8>>>,
}

impl FactorOracle {
    pub fn build(base: Shift, map: BlockMap, budget: usize) -> Result<FactorOracle> {
        let win = 2 * map.radius() + 1;
        // totality on L_{2r+1}(base)
        let windows = crate::language::enumerate(&base, win)?;
        for w in windows.words() {
            if !map.table().contains_key(w) {
                return Err(Error::InvalidSpec(format!(
                    "block map missing window {}",
                    base.alphabet().render(w)
                )));
            }
        }
        let mut images: Vec<HashSet<Vec<u8>>> = Vec::with_capacity(budget + 1);
        images.push(HashSet::from([Vec::new()]));
        for n in 1..=budget {
            let base_words = crate::language::enumerate(&base, n + 2 * map.radius())?;
            let mut set = HashSet::new();
            for v in base_words.words() {
                let img = map.apply(v)?;
                set.insert(img.indices().to_vec());
            }
            images.push(set);
        }
        Ok(FactorOracle {
            base: Box::new(base),
            map,
            budget,
            images,
        })
    }

    pub fn base(&self) -> &Shift {
        &self.base
    }

    pub fn map(&self) -> &BlockMap {
        &self.map
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn target_alphabet(&self) -> &Alphabet {
        self.map.target()
    }

    /// Image language at length n (error beyond the budget).
    pub fn image_words(&self, n: usize) -> Result<Vec<Word>> {
        if n > self.budget {
            return Err(Error::BudgetExceeded {
                requested: n,
                budget: self.budget,
            });
        }
        let mut v: Vec<Word> = self.images[n]
            .iter()
            .map(|b| Word::from_indices(b.clone()))
            .collect();
        v.sort();
        Ok(v)
    }

    pub fn membership(&self, w: &Word) -> Membership {
        if w.len() > self.budget {
            // surfaced as an error by Shift::contains_checked; the raw
            // membership path treats it as out-of-horizon
            return Membership::Unknown {
                horizon: self.budget,
            };
        }
        if self.images[w.len()].contains(w.indices()) {
            Membership::In
        } else {
            Membership::Out
        }
    }

    /// Prefix lookup used by the walker: image languages of subshifts are
    /// factorial, so prefixes of image words are image words.
    pub fn image_prefix_ok(&self, prefix: &Word) -> bool {
        prefix.len() <= self.budget && self.images[prefix.len()].contains(prefix.indices())
    }

    /// Preimage search: base words of length `|w| + 2r` mapping onto `w`.
    /// This is the definitional route, used to cross-check the image sets.
    pub fn preimages(&self, w: &Word) -> Result<Vec<Word>> {
        let r = self.map.radius();
        let target_len = w.len() + 2 * r;
        let mut out = Vec::new();
        let mut buf = Word::empty();
        let Some(walk) = self.base.walk_init() else {
            return Ok(out);
        };
        self.preimage_rec(w, target_len, &walk, &mut buf, &mut out)?;
        Ok(out)
    }

    fn preimage_rec(
        &self,
        w: &Word,
        target_len: usize,
        walk: &crate::shift::Walk,
        buf: &mut Word,
        out: &mut Vec<Word>,
    ) -> Result<()> {
        if buf.len() == target_len {
            out.push(buf.clone());
            return Ok(());
        }
        let pos = buf.len();
        let win = 2 * self.map.radius() + 1;
        for a in 0..self.base.alphabet().len() as u8 {
            buf.push(a);
            if let Some(next) = self.base.walk_push(walk, pos, a) {
                // once a full window is available, its image is forced
                let ok = if buf.len() >= win {
                    let window = buf.subword(buf.len() - win, buf.len());
                    self.map.table().get(&window) == Some(&w.get(buf.len() - win))
                } else {
                    true
                };
                if ok {
                    self.preimage_rec(w, target_len, &next, buf, out)?;
                }
            }
            buf.pop();
        }
        Ok(())
    }
}


#[cfg(test)]
mod budget_guard_tests {
    use super::*;
    use crate::analysis::{check_almost_spec, AlmostSpecMode, Horizon};
    use crate::mistake::MistakeFunction;
    use crate::shift::{make_shift, ShiftSpec};

    fn tiny_factor(budget: usize) -> crate::shift::Shift {
        let a = Alphabet::binary();
        let base = ShiftSpec::Sft {
            alphabet: a.clone(),
            forbidden: vec![a.word_from_str("11").unwrap()],
        };
        let map = {
            let b = make_shift(base.clone()).unwrap();
            BlockMap::letter_map(b.alphabet(), vec!["0".into(), "1".into()]).unwrap()
        };
        make_shift(ShiftSpec::Factor {
            base: Box::new(base),
            map,
            budget,
        })
        .unwrap()
    }

    #[test]
    fn sweeps_error_when_concatenations_exceed_the_budget() {
        // the LAS sweep at (8,8) probes words of length 16; a budget-10
        // factor must refuse rather than misreport silent walker deaths
        let f = tiny_factor(10);
        let g = MistakeFunction::constant(1);
        let err = check_almost_spec(&f, &g, AlmostSpecMode::Las, Horizon::new(8, 8));
        assert!(matches!(err, Err(crate::error::Error::BudgetExceeded { .. })));
        // within budget everything runs
        assert!(check_almost_spec(&f, &g, AlmostSpecMode::Las, Horizon::new(5, 5))
            .unwrap()
            .holds());
    }

    #[test]
    fn products_inherit_component_budgets() {
        let f = tiny_factor(8);
        let full = make_shift(ShiftSpec::Full {
            alphabet: Alphabet::binary(),
        })
        .unwrap();
        let product = make_shift(ShiftSpec::Product {
            left: Box::new(f.spec().clone()),
            right: Box::new(full.spec().clone()),
        })
        .unwrap();
        assert_eq!(product.max_word_len(), Some(8));
        assert!(crate::language::enumerate(&product, 9).is_err());
        assert_eq!(
            crate::language::enumerate(&product, 4).unwrap().count_certain(),
            8 * 16
        );
    }
}
