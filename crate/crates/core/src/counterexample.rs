//! The double-log coded counterexample at desk scale: a signed alphabet
//! `{-N..-1, 1..N}`, positive generators whose doubly-exponential blocks are
//! pinned to Hamming spanning sets, the mirrored negative family, and the
//! coded shift they generate.
//!
//! The construction is structural verification only: the entropy conclusion
//! in the source result needs `N > 2^17 + 4`, far beyond enumeration, and
//! every report produced here says so.

use crate::alphabet::{Alphabet, Word};
use crate::analysis::{
    build_spanning_set, check_almost_spec, AlmostSpecMode, Horizon, PropertyVerdict,
};
use crate::error::{Error, Result};
use crate::language::count_words;
use crate::mistake::MistakeFunction;
use crate::shift::{make_coded_with_upper, Shift, SignStructure};
use std::collections::BTreeMap;

/// The caveat attached to every report: structural checks at small N do not
/// establish the entropy conclusion.
pub const SCALE_CAVEAT: &str =
    "desk-scale N: the construction needs N > 2^17 + 4 for the multiple-MME conclusion; \
     structural properties are verified, the entropy theorem is not";

/// Number of constrained block stages for generator length n.
pub fn stage_count(n: usize) -> usize {
    if n < 4 {
        return 0;
    }
    // floor(log2 log2 n)
    let l2 = (usize::BITS - 1 - n.leading_zeros()) as usize;
    (usize::BITS - 1 - l2.leading_zeros()) as usize
}

/// Constrained blocks for generators of length n: 1-based position ranges
/// `[2^{2^i}+1, 2^{2^{i+1}}]` for each stage `i < stage_count(n)`.
pub fn constrained_blocks(n: usize) -> Vec<(usize, usize)> {
    (0..stage_count(n))
        .map(|i| {
            let a = 1usize << (1usize << i);
            let b = 1usize << (1usize << (i + 1));
            (a + 1, b)
        })
        .collect()
}

/// The mistake function of the construction: `1 + 2 floor(log2 log2 n)` for
/// `n >= 4` and 1 below.
pub fn loglog_mistakes() -> MistakeFunction {
    MistakeFunction::one_plus_two_loglog()
}

pub struct CounterexampleSpec {
    /// N: half the alphabet size.
    pub half_alphabet: usize,
    pub n_max: usize,
    /// Generators are materialized for lengths `1..=generator_depth`.
    pub generator_depth: usize,
    pub alphabet: Alphabet,
    /// Spanning sets per block length, over positive symbol values 1..=N.
    pub spanning: BTreeMap<usize, Vec<Vec<u8>>>,
    /// Positive generators per length (words over the signed alphabet).
    pub pos_generators: Vec<Vec<Word>>,
    /// Negative mirrors per length.
    pub neg_generators: Vec<Vec<Word>>,
    pub shift: Shift,
}

/// Supplies spanning sets per block length; the default asks the greedy
/// covering-code builder at radius 2.
pub type SpanningSource<'a> = &'a mut dyn FnMut(usize) -> Result<Vec<Vec<u8>>>;

/// Greedy 2-spanning source over `{1..N}^len`.
pub fn greedy_spanning_source(half_alphabet: usize) -> impl FnMut(usize) -> Result<Vec<Vec<u8>>> {
    move |len: usize| {
        let pos_alpha = Alphabet::new((1..=half_alphabet).map(|v| v.to_string()).collect())?;
        let set = build_spanning_set(&pos_alpha, len, 2).map_err(|e| match e {
            Error::BudgetExceeded { .. } => Error::InvalidSpec(format!(
                "spanning set for block length {len} exceeds the construction budget"
            )),
            other => other,
        })?;
        // convert from alphabet indices to symbol values 1..=N
        Ok(set
            .words
            .iter()
            .map(|w| w.indices().iter().map(|&i| i + 1).collect())
            .collect())
    }
}

/// Build the construction: generators to depth `n_max + 4` (so that words of
/// length `n_max` embed as generator suffixes past the first constrained
/// block), the mirrored family, and the coded shift with the sign-structure
/// side oracle.
pub fn build_counterexample(
    half_alphabet: usize,
    n_max: usize,
    source: SpanningSource,
) -> Result<CounterexampleSpec> {
    if half_alphabet < 2 {
        return Err(Error::InvalidSpec("need at least 2 positive symbols".into()));
    }
    if n_max < 4 {
        return Err(Error::InvalidSpec("n_max must be at least 4".into()));
    }
    let generator_depth = n_max + 4;
    let alphabet = Alphabet::signed(half_alphabet)?;

    // spanning sets for every block length needed at this depth
    let mut spanning: BTreeMap<usize, Vec<Vec<u8>>> = BTreeMap::new();
    for (a, b) in constrained_blocks(generator_depth) {
        let len = b - a + 1;
        if let std::collections::btree_map::Entry::Vacant(e) = spanning.entry(len) {
            let u = source(len)?;
            if u.is_empty() {
                return Err(Error::InvalidSpec(format!(
                    "spanning source returned no words for block length {len}"
                )));
            }
            e.insert(u);
        }
    }

    let pos_index =
        |v: u8| -> u8 { alphabet.index_of_label(v as i64).expect("positive symbol") };
    let neg_index =
        |v: u8| -> u8 { alphabet.index_of_label(-(v as i64)).expect("negative symbol") };

    let mut pos_generators: Vec<Vec<Word>> = Vec::with_capacity(generator_depth);
    let mut neg_generators: Vec<Vec<Word>> = Vec::with_capacity(generator_depth);
    for n in 1..=generator_depth {
        let blocks = constrained_blocks(n);
        // per-position plan: fixed first symbol, block members, free slots
        let mut words: Vec<Vec<u8>> = vec![vec![1u8]]; // symbol value 1 at position 1
        let mut pos = 2usize;
        for &(a, b) in &blocks {
            // free positions before the block
            while pos < a {
                words = extend_free(words, half_alphabet);
                pos += 1;
            }
            let members = &spanning[&(b - a + 1)];
            let mut next = Vec::with_capacity(words.len() * members.len());
            for w in &words {
                for m in members {
                    let mut v = w.clone();
                    v.extend_from_slice(m);
                    next.push(v);
                }
            }
            words = next;
            pos = b + 1;
        }
        while pos <= n {
            words = extend_free(words, half_alphabet);
            pos += 1;
        }
        words.sort();
        // negation reverses lexicographic order, so both sides re-sort in
        // index order for binary-search membership
        let mut pos_words: Vec<Word> = words
            .iter()
            .map(|w| Word::from_indices(w.iter().map(|&v| pos_index(v)).collect()))
            .collect();
        let mut neg_words: Vec<Word> = words
            .iter()
            .map(|w| Word::from_indices(w.iter().map(|&v| neg_index(v)).collect()))
            .collect();
        pos_words.sort();
        neg_words.sort();
        pos_generators.push(pos_words);
        neg_generators.push(neg_words);
    }

    let mut generators: Vec<Word> = Vec::new();
    for n in 0..generator_depth {
        generators.extend(pos_generators[n].iter().cloned());
        generators.extend(neg_generators[n].iter().cloned());
    }
    generators.sort_by(|a, b| a.canonical_cmp(b));
    let upper = SignStructure::from_alphabet(&alphabet)?;
    let shift = make_coded_with_upper(alphabet.clone(), generators, 4, false, upper)?;

    Ok(CounterexampleSpec {
        half_alphabet,
        n_max,
        generator_depth,
        alphabet,
        spanning,
        pos_generators,
        neg_generators,
        shift,
    })
}

fn extend_free(words: Vec<Vec<u8>>, half_alphabet: usize) -> Vec<Vec<u8>> {
    let mut next = Vec::with_capacity(words.len() * half_alphabet);
    for w in &words {
        for v in 1..=half_alphabet as u8 {
            let mut x = w.clone();
            x.push(v);
            next.push(x);
        }
    }
    next
}

impl CounterexampleSpec {
    /// Spanning radius the generators promise at length n.
    pub fn spanning_radius(&self, n: usize) -> usize {
        loglog_mistakes().eval(n)
    }

    /// Constructive nearest generator to a constant-sign word: pin the first
    /// symbol to the unit, snap each constrained block to its nearest
    /// spanning member (ties to the lexicographically least).
    ///
    /// `values` are positive symbol magnitudes 1..=N; the sign chooses the
    /// positive or negative family. Lengths beyond the materialized
    /// generator depth would need unmaterialized spanning sets.
    pub fn nearest_generator(&self, values: &[u8], negative: bool) -> Result<(Word, usize)> {
        let n = values.len();
        if n == 0 || n > self.generator_depth {
            return Err(Error::InsufficientDepth {
                needed: n,
                have: self.generator_depth,
            });
        }
        let mut out: Vec<u8> = values.to_vec();
        let mut changes = 0usize;
        if out[0] != 1 {
            out[0] = 1;
            changes += 1;
        }
        for (a, b) in constrained_blocks(n) {
            let seg = &values[a - 1..b];
            let members = self.spanning.get(&(b - a + 1)).ok_or(Error::InsufficientDepth {
                needed: n,
                have: self.generator_depth,
            })?;
            let mut best: Option<(usize, &Vec<u8>)> = None;
            for m in members {
                let d = m.iter().zip(seg.iter()).filter(|(x, y)| x != y).count();
                if best.map(|(bd, _)| d < bd).unwrap_or(true) {
                    best = Some((d, m));
                }
            }
            let (d, m) = best.expect("spanning sets are nonempty");
            out[a - 1..b].copy_from_slice(m);
            changes += d;
        }
        let word = Word::from_indices(
            out.iter()
                .map(|&v| {
                    let label = if negative { -(v as i64) } else { v as i64 };
                    self.alphabet.index_of_label(label).expect("symbol")
                })
                .collect(),
        );
        Ok((word, changes))
    }

    /// Membership of a word in the materialized generator set of its length.
    pub fn is_generator(&self, w: &Word) -> bool {
        let n = w.len();
        if n == 0 || n > self.generator_depth {
            return false;
        }
        self.pos_generators[n - 1].binary_search(w).is_ok()
            || self.neg_generators[n - 1].binary_search(w).is_ok()
    }

    /// Maximal constant-sign blocks of a word, as (start, end) ranges.
    pub fn sign_blocks(&self, w: &Word) -> Vec<(usize, usize)> {
        let labels = self.alphabet.labels().expect("signed alphabet");
        let sign = |i: usize| labels[w.get(i) as usize].signum();
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 1..w.len() {
            if sign(i) != sign(i - 1) {
                blocks.push((start, i));
                start = i;
            }
        }
        if !w.is_empty() {
            blocks.push((start, w.len()));
        }
        blocks
    }

    /// The constructive one-sided witness: replace the leading constant-sign
    /// block of `right` by its nearest generator and keep the rest. Returns
    /// the perturbed word and the Hamming distance spent.
    pub fn constructive_right_witness(&self, right: &Word) -> Result<(Word, usize)> {
        if right.is_empty() {
            return Err(Error::InvalidSpec("right word must be nonempty".into()));
        }
        let labels = self.alphabet.labels().expect("signed alphabet");
        let blocks = self.sign_blocks(right);
        let (bs, be) = blocks[0];
        let negative = labels[right.get(bs) as usize] < 0;
        let values: Vec<u8> = (bs..be)
            .map(|i| labels[right.get(i) as usize].unsigned_abs() as u8)
            .collect();
        let (snapped, changes) = self.nearest_generator(&values, negative)?;
        let mut out = snapped;
        for i in be..right.len() {
            out.push(right.get(i));
        }
        Ok((out, changes))
    }
}

/// One audited length of the construction.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CounterexampleRow {
    pub n: usize,
    pub t_pos_count: u128,
    /// `N^{n-1} * prod |U_l| / N^l`, from the achieved spanning sizes.
    pub formula_count: f64,
    pub counts_match_formula: bool,
    /// `|T^+_n| <= N^n / N`.
    pub crude_bound_ok: bool,
    pub spanning_radius: usize,
    pub spanning_ok: bool,
    pub prefix_closed: bool,
    pub embed_ok: bool,
    pub language_certain: u128,
    pub language_possible: u128,
    pub entropy_estimate: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct CounterexampleAudit {
    pub half_alphabet: usize,
    pub rows: Vec<CounterexampleRow>,
    pub sign_symmetric: bool,
    /// `sum_j |T_j| / N^j` over the audited lengths.
    pub generator_mass: f64,
    pub generator_mass_below_one: bool,
    pub log_half_alphabet: f64,
    pub caveat: String,
}

/// Audit every counting inequality with achieved values, verify the
/// embeddings of both sign-class full shifts, and report entropy estimates.
pub fn audit_counterexample(spec: &CounterexampleSpec, n_max: usize) -> Result<CounterexampleAudit> {
    if n_max > spec.generator_depth {
        return Err(Error::InsufficientDepth {
            needed: n_max,
            have: spec.generator_depth,
        });
    }
    let nn = spec.half_alphabet as f64;
    let mut rows = Vec::with_capacity(n_max);
    let mut sign_symmetric = true;
    let mut mass = 0.0;
    for n in 1..=n_max {
        let pos = &spec.pos_generators[n - 1];
        let neg = &spec.neg_generators[n - 1];
        sign_symmetric &= pos.len() == neg.len();
        let t_pos_count = pos.len() as u128;
        let mut formula = nn.powi(n as i32 - 1);
        for (a, b) in constrained_blocks(n) {
            let l = b - a + 1;
            formula *= spec.spanning[&l].len() as f64 / nn.powi(l as i32);
        }
        let counts_match_formula = (t_pos_count as f64 - formula).abs() < 0.5;
        let crude_bound_ok = (t_pos_count as f64) <= nn.powi(n as i32) / nn + 0.5;
        let radius = spec.spanning_radius(n);
        let spanning_ok = verify_spanning(spec, n, radius);
        let prefix_closed = verify_prefix_closure(spec, n);
        let embed_ok = verify_embedding(spec, n)?;
        let counts = count_words(&spec.shift, n)?;
        let entropy_estimate = if counts.certain == 0 {
            f64::NEG_INFINITY
        } else {
            (counts.certain as f64).ln() / n as f64
        };
        mass += (pos.len() + neg.len()) as f64 / nn.powi(n as i32);
        rows.push(CounterexampleRow {
            n,
            t_pos_count,
            formula_count: formula,
            counts_match_formula,
            crude_bound_ok,
            spanning_radius: radius,
            spanning_ok,
            prefix_closed,
            embed_ok,
            language_certain: counts.certain,
            language_possible: counts.possible,
            entropy_estimate,
        });
        if !embed_ok {
            return Err(Error::Internal(format!(
                "full-shift embedding failed at length {n}"
            )));
        }
    }
    Ok(CounterexampleAudit {
        half_alphabet: spec.half_alphabet,
        rows,
        sign_symmetric,
        generator_mass: mass,
        generator_mass_below_one: mass < 1.0,
        log_half_alphabet: nn.ln(),
        caveat: SCALE_CAVEAT.into(),
    })
}

/// Every constant-sign word of length n is within the promised radius of a
/// same-sign generator (checked constructively on the positive side and by
/// sign symmetry on the negative side).
fn verify_spanning(spec: &CounterexampleSpec, n: usize, radius: usize) -> bool {
    let nn = spec.half_alphabet as u8;
    let mut values = vec![1u8; n];
    loop {
        let Ok((snapped, changes)) = spec.nearest_generator(&values, false) else {
            return false;
        };
        if changes > radius || !spec.is_generator(&snapped) {
            return false;
        }
        // odometer over symbol values
        let mut i = n;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if values[i] < nn {
                values[i] += 1;
                break;
            }
            values[i] = 1;
        }
    }
}

fn verify_prefix_closure(spec: &CounterexampleSpec, n: usize) -> bool {
    for side in [&spec.pos_generators, &spec.neg_generators] {
        for w in &side[n - 1] {
            for len in 1..n {
                if !spec.is_generator(&w.subword(0, len)) {
                    return false;
                }
            }
        }
    }
    true
}

/// `L_n` of both sign-class full shifts embeds in the coded language.
fn verify_embedding(spec: &CounterexampleSpec, n: usize) -> Result<bool> {
    let nn = spec.half_alphabet as u8;
    for negative in [false, true] {
        let mut values = vec![1u8; n];
        loop {
            let word = Word::from_indices(
                values
                    .iter()
                    .map(|&v| {
                        let label = if negative { -(v as i64) } else { v as i64 };
                        spec.alphabet.index_of_label(label).expect("symbol")
                    })
                    .collect(),
            );
            if !spec.shift.membership(&word).is_in() {
                return Ok(false);
            }
            let mut i = n;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if values[i] < nn {
                    values[i] += 1;
                    break;
                }
                values[i] = 1;
            }
            if values.iter().all(|&v| v == 1) {
                break;
            }
        }
    }
    Ok(true)
}

/// The one-sided check with the double-log mistake function, plus a sweep of
/// the constructive witness mechanism.
pub fn check_ras_loglog(spec: &CounterexampleSpec, horizon: Horizon) -> Result<PropertyVerdict> {
    let g = loglog_mistakes();
    let mut verdict = check_almost_spec(&spec.shift, &g, AlmostSpecMode::Ras, horizon)?;
    verdict
        .params
        .push(("caveat".to_string(), SCALE_CAVEAT.to_string()));
    Ok(verdict)
}

/// Exercise the constructive witness on every pair of certain language words
/// up to the bounds: the perturbed right word must be within budget and the
/// concatenation must be certified in the language.
pub fn verify_constructive_witnesses(
    spec: &CounterexampleSpec,
    max_left: usize,
    max_right: usize,
) -> Result<usize> {
    let g = loglog_mistakes();
    let lefts = crate::language::words_through(&spec.shift, max_left)?;
    let rights = crate::language::words_through(&spec.shift, max_right)?;
    let mut exercised = 0usize;
    for left in &lefts {
        for right in &rights {
            let (witness, changes) = spec.constructive_right_witness(right)?;
            if changes > g.eval(right.len()) {
                return Err(Error::Internal(format!(
                    "constructive witness spent {changes} changes on {}",
                    spec.alphabet.render(right)
                )));
            }
            let joined = left.concat(&witness);
            if !spec.shift.membership(&joined).is_in() {
                return Err(Error::Internal(format!(
                    "constructive witness not certified: {} + {}",
                    spec.alphabet.render(left),
                    spec.alphabet.render(&witness)
                )));
            }
            exercised += 1;
        }
    }
    Ok(exercised)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build_n4() -> CounterexampleSpec {
        let mut source = greedy_spanning_source(4);
        build_counterexample(4, 8, &mut source).unwrap()
    }

    #[test]
    fn stage_counts_and_blocks() {
        assert_eq!(stage_count(3), 0);
        assert_eq!(stage_count(4), 1);
        assert_eq!(stage_count(15), 1);
        assert_eq!(stage_count(16), 2);
        assert_eq!(stage_count(255), 2);
        assert_eq!(stage_count(256), 3);
        assert_eq!(constrained_blocks(8), vec![(3, 4)]);
        assert_eq!(constrained_blocks(16), vec![(3, 4), (5, 16)]);
    }

    #[test]
    fn generator_counts_at_n4() {
        let spec = build_n4();
        // |U_2| is a singleton (radius 2 covers length 2), so |T^+_4| = N
        assert_eq!(spec.spanning[&2].len(), 1);
        assert_eq!(spec.pos_generators[3].len(), 4);
        // below the first block only the leading symbol is pinned
        assert_eq!(spec.pos_generators[0].len(), 1);
        assert_eq!(spec.pos_generators[1].len(), 4);
        assert_eq!(spec.pos_generators[2].len(), 16);
        // free tail positions multiply by N
        assert_eq!(spec.pos_generators[7].len(), 4 * 4 * 4 * 4 * 4);
    }

    #[test]
    fn prefix_closure_holds_through_depth() {
        let spec = build_n4();
        for n in 1..=spec.generator_depth {
            assert!(verify_prefix_closure(&spec, n), "n = {n}");
        }
    }

    #[test]
    fn audit_passes_at_desk_scale() {
        let spec = build_n4();
        let audit = audit_counterexample(&spec, 8).unwrap();
        assert!(audit.sign_symmetric);
        for row in &audit.rows {
            assert!(row.counts_match_formula, "n = {}", row.n);
            assert!(row.crude_bound_ok, "n = {}", row.n);
            assert!(row.spanning_ok, "n = {}", row.n);
            assert!(row.prefix_closed, "n = {}", row.n);
            assert!(row.embed_ok, "n = {}", row.n);
            // the language contains both sign classes
            assert!(row.language_certain >= 2 * 4u128.pow(row.n as u32));
        }
        // at small N the geometric mass is not below one; recorded, not asserted
        assert!(audit.generator_mass > 0.0);
        assert!(audit.caveat.contains("2^17"));
    }

    #[test]
    fn constructive_witnesses_within_budget() {
        let spec = build_n4();
        let exercised = verify_constructive_witnesses(&spec, 3, 4).unwrap();
        assert!(exercised > 0);
    }

    #[test]
    fn ras_with_double_log_budget_holds_small() {
        let spec = build_n4();
        let v = check_ras_loglog(&spec, Horizon::new(3, 3)).unwrap();
        assert!(v.holds(), "{:?}", v.status);
    }

    #[test]
    fn mixed_sign_words_certified() {
        let spec = build_n4();
        // +1 -1 +1: alternating single-symbol generators
        let w = Word::from_indices(vec![
            spec.alphabet.index_of_label(1).unwrap(),
            spec.alphabet.index_of_label(-1).unwrap(),
            spec.alphabet.index_of_label(1).unwrap(),
        ]);
        assert!(spec.shift.membership(&w).is_in());
        // sign change into a non-unit symbol is structurally out
        let bad = Word::from_indices(vec![
            spec.alphabet.index_of_label(2).unwrap(),
            spec.alphabet.index_of_label(-3).unwrap(),
        ]);
        assert!(spec.shift.membership(&bad).is_out());
    }
}
