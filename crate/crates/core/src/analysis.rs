//! Hamming-metric machinery and finite-horizon verification of
//! specification, almost specification, and its one-sided variants.
//!
//! All quantifiers run over nonempty language words up to the stated horizon
//! lengths, in canonical (length, then lexicographic) order; verdicts and
//! witnesses are deterministic and independent of parallel scheduling. A
//! `Holds` is finite-scale evidence, never a theorem.

use crate::alphabet::Word;
use crate::error::{Error, Result};
use crate::language::words_through;
use crate::mistake::MistakeFunction;
use crate::shift::{Shift, Walk};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// Quantifier bounds for pair properties: left words up to `left`, right
/// words up to `right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Horizon {
    pub left: usize,
    pub right: usize,
}

impl Horizon {
    pub fn new(left: usize, right: usize) -> Horizon {
        Horizon { left, right }
    }
}

/// Outcome of a finite-horizon property check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum VerdictStatus {
    Holds,
    FailsWith { witnesses: Vec<String> },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyVerdict {
    pub property: String,
    #[serde(flatten)]
    pub status: VerdictStatus,
    pub horizon: Vec<usize>,
    /// Extra parameters (gap length, mistake function, segment count).
    pub params: Vec<(String, String)>,
    /// Witness words in index form, for programmatic re-checking.
    #[serde(skip)]
    pub witness_words: Vec<Word>,
}

impl PropertyVerdict {
    pub fn holds(&self) -> bool {
        matches!(self.status, VerdictStatus::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self.status, VerdictStatus::FailsWith { .. })
    }

    pub fn inconclusive(&self) -> bool {
        matches!(self.status, VerdictStatus::Inconclusive { .. })
    }

    fn new(
        shift: &Shift,
        property: &str,
        status: Status,
        horizon: Vec<usize>,
        params: Vec<(String, String)>,
    ) -> PropertyVerdict {
        let (status, witness_words) = match status {
            Status::Holds => (VerdictStatus::Holds, Vec::new()),
            Status::Fails(ws) => (
                VerdictStatus::FailsWith {
                    witnesses: ws.iter().map(|w| shift.alphabet().render(w)).collect(),
                },
                ws,
            ),
            Status::Inconclusive(reason) => (VerdictStatus::Inconclusive { reason }, Vec::new()),
        };
        PropertyVerdict {
            property: property.to_string(),
            status,
            horizon,
            params,
            witness_words,
        }
    }
}

enum Status {
    Holds,
    Fails(Vec<Word>),
    Inconclusive(String),
}

/// Variants of almost specification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlmostSpecMode {
    /// Perturb the left word only.
    Las,
    /// Perturb the right word only (the mirror property; equivalently LAS of
    /// the reflected shift).
    Ras,
    /// k-fold concatenation with every segment perturbed within its own
    /// budget.
    As { segments: usize },
}

impl AlmostSpecMode {
    pub fn name(&self) -> &'static str {
        match self {
            AlmostSpecMode::Las => "las",
            AlmostSpecMode::Ras => "ras",
            AlmostSpecMode::As { .. } => "as",
        }
    }
}

/// The language words of length `|w|` within Hamming distance `m` of `w`, in
/// lexicographic order. Includes `w` itself when `w` is in the language.
pub fn hamming_ball(shift: &Shift, w: &Word, m: usize) -> Result<Vec<Word>> {
    shift.alphabet().validate_word(w)?;
    let mut out = Vec::new();
    let Some(root) = shift.walk_init() else {
        return Ok(out);
    };
    let mut buf = Word::empty();
    ball_rec(shift, w, m, &root, &mut buf, &mut |v, _| {
        out.push(v.clone());
        true
    });
    Ok(out)
}

/// DFS over language words within distance `m` of `w`, lexicographic; the
/// visitor gets the word and its final walker state, returns false to stop.
fn ball_rec(
    shift: &Shift,
    w: &Word,
    budget: usize,
    walk: &Walk,
    buf: &mut Word,
    f: &mut dyn FnMut(&Word, &Walk) -> bool,
) -> bool {
    if buf.len() == w.len() {
        if shift.walk_accepts(walk, buf.len()) {
            return f(buf, walk);
        }
        return true;
    }
    let pos = buf.len();
    for a in 0..shift.alphabet().len() as u8 {
        let cost = (a != w.get(pos)) as usize;
        if cost > budget {
            continue;
        }
        buf.push(a);
        let keep = match shift.walk_push(walk, pos, a) {
            Some(st) => ball_rec(shift, w, budget - cost, &st, buf, f),
            None => true,
        };
        buf.pop();
        if !keep {
            return false;
        }
    }
    true
}

/// DFS over language words at Hamming distance exactly `d` from `w`.
fn ball_layer_rec(
    shift: &Shift,
    w: &Word,
    d: usize,
    walk: &Walk,
    buf: &mut Word,
    f: &mut dyn FnMut(&Word, &Walk) -> bool,
) -> bool {
    if buf.len() == w.len() {
        if d == 0 && shift.walk_accepts(walk, buf.len()) {
            return f(buf, walk);
        }
        return true;
    }
    let pos = buf.len();
    let remaining = w.len() - pos;
    for a in 0..shift.alphabet().len() as u8 {
        let cost = (a != w.get(pos)) as usize;
        if cost > d || d - cost > remaining - 1 {
            continue;
        }
        buf.push(a);
        let keep = match shift.walk_push(walk, pos, a) {
            Some(st) => ball_layer_rec(shift, w, d - cost, &st, buf, f),
            None => true,
        };
        buf.pop();
        if !keep {
            return false;
        }
    }
    true
}

/// Walk a whole word from a given state at a given offset; `None` when the
/// walk leaves the language.
fn walk_word(shift: &Shift, from: &Walk, offset: usize, w: &Word) -> Option<Walk> {
    let mut cur = from.clone();
    for i in 0..w.len() {
        cur = shift.walk_push(&cur, offset + i, w.get(i))?;
    }
    Some(cur)
}

/// Smallest `j` such that some language word within distance `j` of `left`
/// can legally precede `right`, with the lexicographically minimal witness.
#[derive(Clone, Debug)]
pub struct MistakeWitness {
    /// `None` means no perturbation works even at radius `|left|`.
    pub mistakes: Option<usize>,
    pub witness: Option<Word>,
}

pub fn min_mistakes_left(shift: &Shift, left: &Word, right: &Word) -> Result<MistakeWitness> {
    shift.alphabet().validate_word(left)?;
    shift.require_depth(left.len() + right.len())?;
    if !shift.is_in(right) {
        return Err(Error::WordNotInLanguage(shift.alphabet().render(right)));
    }
    let Some(root) = shift.walk_init() else {
        return Err(Error::EmptyShift);
    };
    for d in 0..=left.len() {
        let mut hit: Option<Word> = None;
        let mut buf = Word::empty();
        ball_layer_rec(shift, left, d, &root, &mut buf, &mut |v, st| {
            if walk_word(shift, st, v.len(), right)
                .is_some_and(|end| shift.walk_accepts(&end, v.len() + right.len()))
            {
                hit = Some(v.clone());
                return false;
            }
            true
        });
        if let Some(w) = hit {
            return Ok(MistakeWitness {
                mistakes: Some(d),
                witness: Some(w),
            });
        }
    }
    Ok(MistakeWitness {
        mistakes: None,
        witness: None,
    })
}

/// The maximum over word pairs in the horizon of [`min_mistakes_left`]: how
/// many changes left almost specification needs at worst, with the first
/// maximizing pair in canonical order.
#[derive(Clone, Debug)]
pub struct MistakeExtremum {
    pub value: usize,
    /// Left word of the maximizing pair.
    pub tail: Word,
    /// Right word of the maximizing pair.
    pub anchor: Word,
}

pub fn max_left_mistakes(shift: &Shift, horizon: Horizon) -> Result<MistakeExtremum> {
    shift.require_depth(horizon.left + horizon.right)?;
    let lefts = words_through(shift, horizon.left)?;
    let rights = words_through(shift, horizon.right)?;
    let mut best: Option<MistakeExtremum> = None;
    for left in &lefts {
        for right in &rights {
            let m = min_mistakes_left(shift, left, right)?;
            let value = m.mistakes.ok_or_else(|| {
                Error::Internal(format!(
                    "no left perturbation joins {} to {}",
                    shift.alphabet().render(left),
                    shift.alphabet().render(right)
                ))
            })?;
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(MistakeExtremum {
                    value,
                    tail: left.clone(),
                    anchor: right.clone(),
                });
            }
        }
    }
    best.ok_or(Error::EmptyShift)
}

/// Specification check at gap `tau`: every pair of horizon words joins with
/// a connector of exactly that length.
pub fn check_specification(shift: &Shift, tau: usize, horizon: Horizon) -> Result<PropertyVerdict> {
    shift.require_depth(horizon.left + tau + horizon.right)?;
    let params = vec![("tau".to_string(), tau.to_string())];
    let mk = |status| {
        PropertyVerdict::new(
            shift,
            "specification",
            status,
            vec![horizon.left, horizon.right],
            params.clone(),
        )
    };
    let lefts = words_through(shift, horizon.left)?;
    let rights = words_through(shift, horizon.right)?;
    let Some(root) = shift.walk_init() else {
        return Ok(mk(Status::Inconclusive("empty shift".into())));
    };

    let fail = (0..lefts.len())
        .into_par_iter()
        .filter_map(|vi| {
            let v = &lefts[vi];
            let vstate = walk_word(shift, &root, 0, v)?;
            for (wi, w) in rights.iter().enumerate() {
                if !connector_exists(shift, &vstate, v.len(), tau, w) {
                    return Some((vi, wi));
                }
            }
            None
        })
        .min();
    match fail {
        None => Ok(mk(Status::Holds)),
        Some((vi, wi)) => {
            if shift.is_exact() {
                Ok(mk(Status::Fails(vec![lefts[vi].clone(), rights[wi].clone()])))
            } else {
                Ok(mk(Status::Inconclusive(format!(
                    "no connector certified for pair ({}, {}) at this horizon",
                    shift.alphabet().render(&lefts[vi]),
                    shift.alphabet().render(&rights[wi]),
                ))))
            }
        }
    }
}

/// Is there `u` with `|u| = tau` and `v u w` in the language? DFS over
/// connector symbols from the state after `v`.
fn connector_exists(shift: &Shift, vstate: &Walk, vlen: usize, tau: usize, w: &Word) -> bool {
    fn rec(shift: &Shift, st: &Walk, pos: usize, left: usize, w: &Word) -> bool {
        if left == 0 {
            return walk_word(shift, st, pos, w)
                .is_some_and(|end| shift.walk_accepts(&end, pos + w.len()));
        }
        for a in 0..shift.alphabet().len() as u8 {
            if let Some(next) = shift.walk_push(st, pos, a) {
                if rec(shift, &next, pos + 1, left - 1, w) {
                    return true;
                }
            }
        }
        false
    }
    rec(shift, vstate, vlen, tau, w)
}

/// Almost-specification check in the requested mode.
pub fn check_almost_spec(
    shift: &Shift,
    g: &MistakeFunction,
    mode: AlmostSpecMode,
    horizon: Horizon,
) -> Result<PropertyVerdict> {
    let needed = match mode {
        AlmostSpecMode::As { segments } => {
            segments.saturating_sub(1).max(1) * horizon.left + horizon.right
        }
        _ => horizon.left + horizon.right,
    };
    shift.require_depth(needed)?;
    let mut params = vec![("g".to_string(), g.describe())];
    if let AlmostSpecMode::As { segments } = mode {
        params.push(("segments".to_string(), segments.to_string()));
    }
    let mk = |status| {
        PropertyVerdict::new(
            shift,
            mode.name(),
            status,
            vec![horizon.left, horizon.right],
            params.clone(),
        )
    };
    if shift.walk_init().is_none() {
        return Ok(mk(Status::Inconclusive("empty shift".into())));
    }
    let status = match mode {
        AlmostSpecMode::Las => check_las(shift, g, horizon)?,
        AlmostSpecMode::Ras => check_ras(shift, g, horizon)?,
        AlmostSpecMode::As { segments } => check_as(shift, g, segments, horizon)?,
    };
    Ok(mk(status))
}

fn fail_or_inconclusive(shift: &Shift, witnesses: Vec<Word>) -> Status {
    if shift.is_exact() {
        Status::Fails(witnesses)
    } else {
        let rendered: Vec<String> = witnesses
            .iter()
            .map(|w| shift.alphabet().render(w))
            .collect();
        Status::Inconclusive(format!(
            "no witness certified for ({}) within the oracle horizon",
            rendered.join(", ")
        ))
    }
}

fn check_las(shift: &Shift, g: &MistakeFunction, horizon: Horizon) -> Result<Status> {
    let lefts = words_through(shift, horizon.left)?;
    let rights = words_through(shift, horizon.right)?;
    let root = shift.walk_init().expect("nonempty");
    let fail = (0..lefts.len())
        .into_par_iter()
        .filter_map(|li| {
            let left = &lefts[li];
            let budget = g.eval(left.len());
            for (ri, right) in rights.iter().enumerate() {
                if !las_pair_ok(shift, &root, left, budget, right) {
                    return Some((li, ri));
                }
            }
            None
        })
        .min();
    Ok(match fail {
        None => Status::Holds,
        Some((li, ri)) => {
            fail_or_inconclusive(shift, vec![lefts[li].clone(), rights[ri].clone()])
        }
    })
}

/// Exists a perturbation of `left` within `budget` whose concatenation with
/// `right` stays in the language.
fn las_pair_ok(shift: &Shift, root: &Walk, left: &Word, budget: usize, right: &Word) -> bool {
    for d in 0..=budget.min(left.len()) {
        let mut found = false;
        let mut buf = Word::empty();
        ball_layer_rec(shift, left, d, root, &mut buf, &mut |v, st| {
            if walk_word(shift, st, v.len(), right)
                .is_some_and(|end| shift.walk_accepts(&end, v.len() + right.len()))
            {
                found = true;
                return false;
            }
            true
        });
        if found {
            return true;
        }
    }
    false
}

fn check_ras(shift: &Shift, g: &MistakeFunction, horizon: Horizon) -> Result<Status> {
    let lefts = words_through(shift, horizon.left)?;
    let rights = words_through(shift, horizon.right)?;
    let root = shift.walk_init().expect("nonempty");

    // Left words with equal walker state admit exactly the same
    // continuations, so the perturbation search runs once per (state, right)
    // class instead of once per pair.
    let mut classes: HashMap<(usize, Walk), usize> = HashMap::new();
    let mut class_rep: Vec<usize> = Vec::new(); // minimal left index per class
    let mut class_state: Vec<(usize, Walk)> = Vec::new();
    for (li, left) in lefts.iter().enumerate() {
        let Some(state) = walk_word(shift, &root, 0, left) else {
            continue;
        };
        let key = (left.len(), state);
        if let Some(&c) = classes.get(&key) {
            class_rep[c] = class_rep[c].min(li);
        } else {
            let c = class_state.len();
            classes.insert(key.clone(), c);
            class_rep.push(li);
            class_state.push(key);
        }
    }

    let fail = (0..class_state.len())
        .into_par_iter()
        .filter_map(|c| {
            let (len, state) = &class_state[c];
            for (ri, right) in rights.iter().enumerate() {
                let budget = g.eval(right.len());
                if !ras_pair_ok(shift, state, *len, right, budget) {
                    return Some((class_rep[c], ri));
                }
            }
            None
        })
        .min();
    Ok(match fail {
        None => Status::Holds,
        Some((li, ri)) => {
            fail_or_inconclusive(shift, vec![lefts[li].clone(), rights[ri].clone()])
        }
    })
}

/// Exists a perturbation of `right` within `budget` readable after the left
/// state.
fn ras_pair_ok(shift: &Shift, state: &Walk, offset: usize, right: &Word, budget: usize) -> bool {
    fn rec(
        shift: &Shift,
        st: &Walk,
        offset: usize,
        right: &Word,
        pos: usize,
        budget: usize,
        total: usize,
    ) -> bool {
        if pos == right.len() {
            return shift.walk_accepts(st, total);
        }
        for a in 0..shift.alphabet().len() as u8 {
            let cost = (a != right.get(pos)) as usize;
            if cost > budget {
                continue;
            }
            if let Some(next) = shift.walk_push(st, offset + pos, a) {
                if rec(shift, &next, offset, right, pos + 1, budget - cost, total) {
                    return true;
                }
            }
        }
        false
    }
    rec(
        shift,
        state,
        offset,
        right,
        0,
        budget,
        offset + right.len(),
    )
}

fn check_as(
    shift: &Shift,
    g: &MistakeFunction,
    segments: usize,
    horizon: Horizon,
) -> Result<Status> {
    if segments < 2 {
        return Err(Error::InvalidSpec("AS needs at least 2 segments".into()));
    }
    let heads = words_through(shift, horizon.left)?;
    let tails = words_through(shift, horizon.right)?;
    if heads.is_empty() || tails.is_empty() {
        return Err(Error::InvalidSpec("horizon admits no words".into()));
    }
    let root = shift.walk_init().expect("nonempty");

    // k-tuples: segments 1..k-1 from the left horizon, the final segment
    // from the right horizon; scanned in canonical tuple order,
    // parallelized over the first segment. Distinct head states admit the
    // same tail continuations, so the all-unperturbed fast path is a
    // memoized per-state bitmap over the tails; only tuples that fail it
    // run the perturbation search.
    let k = segments - 1;
    let fail: Option<Vec<usize>> = (0..heads.len())
        .into_par_iter()
        .filter_map(|h0| {
            let mut idx = vec![0usize; k - 1];
            let mut segs: Vec<&Word> = Vec::with_capacity(k + 1);
            let mut memo: HashMap<(usize, Walk), Vec<bool>> = HashMap::new();
            loop {
                segs.clear();
                segs.push(&heads[h0]);
                segs.extend(idx.iter().map(|&i| &heads[i]));
                let head_len: usize = segs.iter().map(|w| w.len()).sum();
                let head_state = walk_segments(shift, &root, &segs);
                segs.push(&heads[h0]); // placeholder for the tail slot
                let pass: Option<&Vec<bool>> = head_state.map(|st| {
                    &*memo.entry((head_len, st)).or_insert_with_key(|(len, st)| {
                        tails
                            .iter()
                            .map(|t| {
                                walk_word(shift, st, *len, t)
                                    .is_some_and(|end| shift.walk_accepts(&end, len + t.len()))
                            })
                            .collect()
                    })
                });
                for (ti, tail) in tails.iter().enumerate() {
                    let fast = pass.is_some_and(|v| v[ti]);
                    if !fast {
                        *segs.last_mut().expect("tail slot") = tail;
                        if !as_tuple_ok(shift, &root, g, &segs) {
                            let mut w = vec![h0];
                            w.extend_from_slice(&idx);
                            w.push(ti);
                            return Some(w);
                        }
                    }
                }
                // odometer over the remaining head indices, rightmost fastest
                let mut j = idx.len();
                loop {
                    if j == 0 {
                        return None;
                    }
                    j -= 1;
                    idx[j] += 1;
                    if idx[j] < heads.len() {
                        break;
                    }
                    idx[j] = 0;
                }
            }
        })
        .min();
    Ok(match fail {
        None => Status::Holds,
        Some(tuple) => {
            let mut ws: Vec<Word> = tuple[..tuple.len() - 1]
                .iter()
                .map(|&i| heads[i].clone())
                .collect();
            ws.push(tails[tuple[tuple.len() - 1]].clone());
            fail_or_inconclusive(shift, ws)
        }
    })
}

/// A verified Hamming cover of the full word cube `A^n`.
#[derive(Clone, Debug)]
pub struct SpanningSet {
    pub n: usize,
    pub radius: usize,
    /// Cover words in lexicographic order.
    pub words: Vec<Word>,
    /// `(16/n^2) |A|^n`, the size the covering-code lemma guarantees
    /// exists. Reported for comparison only; audits use the achieved size.
    pub bound: f64,
    /// Whether the cover was re-verified exhaustively (vs. sampled).
    pub verified_exhaustive: bool,
}

const SPAN_CONSTRUCT_LIMIT: u128 = 1 << 18;
const SPAN_VERIFY_LIMIT: u128 = 1 << 17;
const SPAN_SAMPLES: usize = 10_000;

/// Greedy Hamming set cover: repeatedly pick the word covering the most
/// uncovered points (ties to the lexicographically least), until every word
/// of `A^n` is within distance `radius` of the set.
pub fn build_spanning_set(
    alphabet: &crate::alphabet::Alphabet,
    n: usize,
    radius: usize,
) -> Result<SpanningSet> {
    if n == 0 || radius == 0 {
        return Err(Error::InvalidSpec("spanning set needs n, radius >= 1".into()));
    }
    let a = alphabet.len();
    let universe = (a as u128).checked_pow(n as u32).filter(|&u| u <= SPAN_CONSTRUCT_LIMIT);
    let Some(universe) = universe else {
        return Err(Error::BudgetExceeded {
            requested: n,
            budget: 0,
        });
    };
    let universe = universe as usize;
    let bound = 16.0 / (n as f64 * n as f64) * (a as f64).powi(n as i32);

    if radius >= n {
        // a single word covers everything
        let w = Word::repeated(0, n);
        return Ok(SpanningSet {
            n,
            radius,
            words: vec![w],
            bound,
            verified_exhaustive: true,
        });
    }

    let decode = |mut r: usize| -> Word {
        let mut idx = vec![0u8; n];
        for i in (0..n).rev() {
            idx[i] = (r % a) as u8;
            r /= a;
        }
        Word::from_indices(idx)
    };
    // ranks within the sphere around a word (radius over all positions)
    fn sphere_ranks(w: &Word, radius: usize, a: usize, out: &mut Vec<usize>) {
        fn rec(
            w: &Word,
            pos: usize,
            budget: usize,
            acc: usize,
            a: usize,
            out: &mut Vec<usize>,
        ) {
            if pos == w.len() {
                out.push(acc);
                return;
            }
            for s in 0..a as u8 {
                let cost = (s != w.get(pos)) as usize;
                if cost > budget {
                    continue;
                }
                rec(w, pos + 1, budget - cost, acc * a + s as usize, a, out);
            }
        }
        out.clear();
        rec(w, 0, radius, 0, a, out);
    }

    let mut covered = vec![false; universe];
    let mut uncovered_left = universe;
    // gain[r] = how many currently uncovered points the sphere at r covers
    let sphere_size = {
        let mut tmp = Vec::new();
        sphere_ranks(&decode(0), radius, a, &mut tmp);
        tmp.len()
    };
    let mut gain: Vec<u32> = vec![sphere_size as u32; universe];
    // lazy max-heap keyed by (gain, Reverse(rank)); stale entries skipped
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut heap: BinaryHeap<(u32, Reverse<usize>)> =
        (0..universe).map(|r| (sphere_size as u32, Reverse(r))).collect();

    let mut picked: Vec<Word> = Vec::new();
    let mut sphere = Vec::new();
    let mut neighborhood = Vec::new();
    while uncovered_left > 0 {
        let Some((g0, Reverse(r))) = heap.pop() else {
            return Err(Error::Internal("cover heap exhausted early".into()));
        };
        if gain[r] != g0 {
            continue; // stale
        }
        if g0 == 0 {
            return Err(Error::Internal("no candidate covers remaining points".into()));
        }
        let w = decode(r);
        picked.push(w.clone());
        sphere_ranks(&w, radius, a, &mut sphere);
        for &p in sphere.iter() {
            if covered[p] {
                continue;
            }
            covered[p] = true;
            uncovered_left -= 1;
            // every candidate whose sphere contains p loses one point
            sphere_ranks(&decode(p), radius, a, &mut neighborhood);
            for &c in neighborhood.iter() {
                gain[c] -= 1;
                heap.push((gain[c], Reverse(c)));
            }
        }
    }
    picked.sort();

    // independent re-verification of the cover
    let verify = |w: &Word| picked.iter().any(|u| u.hamming(w) <= radius);
    let verified_exhaustive = (universe as u128) <= SPAN_VERIFY_LIMIT;
    if verified_exhaustive {
        for r in 0..universe {
            if !verify(&decode(r)) {
                return Err(Error::Internal(format!(
                    "constructed set misses word rank {r}"
                )));
            }
        }
    } else {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_c0de);
        for _ in 0..SPAN_SAMPLES {
            let r = rng.random_range(0..universe);
            if !verify(&decode(r)) {
                return Err(Error::Internal(format!(
                    "constructed set misses sampled word rank {r}"
                )));
            }
        }
    }
    Ok(SpanningSet {
        n,
        radius,
        words: picked,
        bound,
        verified_exhaustive,
    })
}

/// Walk a sequence of segments as one concatenation; the end state, or
/// `None` when the walk leaves the language.
fn walk_segments(shift: &Shift, root: &Walk, segs: &[&Word]) -> Option<Walk> {
    let mut st = root.clone();
    let mut pos = 0usize;
    for seg in segs {
        for i in 0..seg.len() {
            st = shift.walk_push(&st, pos, seg.get(i))?;
            pos += 1;
        }
    }
    Some(st)
}

/// Is the concatenation of the segments in the language?
fn plain_concat_in(shift: &Shift, root: &Walk, segs: &[&Word]) -> bool {
    let total: usize = segs.iter().map(|w| w.len()).sum();
    walk_segments(shift, root, segs).is_some_and(|st| shift.walk_accepts(&st, total))
}

/// Right-to-left search: perturb each segment within its own budget so the
/// concatenation stays in the language (the final segment is tried
/// unperturbed first). The fully unperturbed concatenation is tried up
/// front, which settles the bulk of the tuples with a single walk.
fn as_tuple_ok(shift: &Shift, root: &Walk, g: &MistakeFunction, segs: &[&Word]) -> bool {
    if plain_concat_in(shift, root, segs) {
        return true;
    }
    fn rec(shift: &Shift, root: &Walk, g: &MistakeFunction, segs: &[&Word], suffix: &Word) -> bool {
        let Some((last, init)) = segs.split_last() else {
            return true;
        };
        let budget = g.eval(last.len()).min(last.len());
        for d in 0..=budget {
            let mut ok = false;
            let mut buf = Word::empty();
            ball_layer_rec(shift, last, d, root, &mut buf, &mut |v, st| {
                let joined = v.concat(suffix);
                if walk_word(shift, st, v.len(), suffix)
                    .is_some_and(|end| shift.walk_accepts(&end, joined.len()))
                    && (init.is_empty() || rec(shift, root, g, init, &joined))
                {
                    ok = true;
                    return false;
                }
                true
            });
            if ok {
                return true;
            }
        }
        false
    }
    rec(shift, root, g, segs, &Word::empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::shift::{make_shift, ShiftSpec};

    fn golden() -> Shift {
        let a = Alphabet::binary();
        make_shift(ShiftSpec::Sft {
            alphabet: a.clone(),
            forbidden: vec![a.word_from_str("11").unwrap()],
        })
        .unwrap()
    }

    fn full2() -> Shift {
        make_shift(ShiftSpec::Full {
            alphabet: Alphabet::binary(),
        })
        .unwrap()
    }

    fn beta_golden() -> Shift {
        make_shift(ShiftSpec::Beta {
            expansion: crate::shift::Expansion::new(vec![], vec![1, 0]).unwrap(),
        })
        .unwrap()
    }

    fn amoo() -> Shift {
        make_shift(ShiftSpec::AtMostOneOne).unwrap()
    }

    #[test]
    fn hamming_ball_full_shift() {
        let s = full2();
        let a = s.alphabet().clone();
        let ball = hamming_ball(&s, &a.word_from_str("000").unwrap(), 1).unwrap();
        let rendered: Vec<String> = ball.iter().map(|w| a.render(w)).collect();
        assert_eq!(rendered, ["000", "001", "010", "100"]);
    }

    #[test]
    fn hamming_ball_respects_language() {
        // oracle: enumerate L_3 by brute force and filter by distance
        let s = golden();
        let a = s.alphabet().clone();
        let center = a.word_from_str("010").unwrap();
        let mut expect = Vec::new();
        for r in 0..8u8 {
            let w = Word::from_indices(vec![(r >> 2) & 1, (r >> 1) & 1, r & 1]);
            let has11 = w.indices().windows(2).any(|p| p == [1, 1]);
            if !has11 && w.hamming(&center) <= 1 {
                expect.push(w);
            }
        }
        expect.sort();
        let ball = hamming_ball(&s, &center, 1).unwrap();
        assert_eq!(ball, expect);
        let rendered: Vec<String> = ball.iter().map(|w| a.render(w)).collect();
        assert_eq!(rendered, ["000", "010"]);
    }

    #[test]
    fn radius_at_least_length_gives_whole_slice() {
        let s = golden();
        let a = s.alphabet().clone();
        let ball = hamming_ball(&s, &a.word_from_str("101").unwrap(), 3).unwrap();
        assert_eq!(ball.len(), 5); // |L_3| of the golden mean
    }

    #[test]
    fn min_mistakes_examples() {
        let full = full2();
        let a = full.alphabet().clone();
        let w01 = a.word_from_str("01").unwrap();
        let w10 = a.word_from_str("10").unwrap();
        assert_eq!(
            min_mistakes_left(&full, &w01, &w10).unwrap().mistakes,
            Some(0)
        );
        let g = golden();
        let m = min_mistakes_left(&g, &w01, &w10).unwrap();
        assert_eq!(m.mistakes, Some(1));
        assert_eq!(g.alphabet().render(&m.witness.unwrap()), "00");
        let am = amoo();
        assert_eq!(
            min_mistakes_left(&am, &w01, &w10).unwrap().mistakes,
            Some(1)
        );
    }

    #[test]
    fn min_mistakes_requires_right_word_in_language() {
        let g = golden();
        let a = g.alphabet().clone();
        let w11 = a.word_from_str("11").unwrap();
        let w0 = a.word_from_str("0").unwrap();
        assert!(min_mistakes_left(&g, &w0, &w11).is_err());
    }

    #[test]
    fn max_left_mistakes_values() {
        let h = Horizon::new(4, 4);
        assert_eq!(max_left_mistakes(&full2(), h).unwrap().value, 0);
        let g = max_left_mistakes(&golden(), h).unwrap();
        assert_eq!(g.value, 1);
        // canonical first maximizing pair: tail "1", anchor "1"
        assert_eq!(golden().alphabet().render(&g.tail), "1");
        assert_eq!(golden().alphabet().render(&g.anchor), "1");
        let b = max_left_mistakes(&beta_golden(), Horizon::new(5, 5)).unwrap();
        assert_eq!(b.value, 1);
    }

    #[test]
    fn specification_verdicts() {
        assert!(check_specification(&full2(), 0, Horizon::new(4, 4))
            .unwrap()
            .holds());
        assert!(check_specification(&golden(), 1, Horizon::new(6, 6))
            .unwrap()
            .holds());
        let v = check_specification(&amoo(), 2, Horizon::new(3, 3)).unwrap();
        match &v.status {
            VerdictStatus::FailsWith { witnesses } => {
                assert_eq!(witnesses, &["1".to_string(), "1".to_string()]);
            }
            other => panic!("expected failure, got {other:?}"),
        }
        // witnesses re-fail when re-checked
        let wl = &v.witness_words[0];
        let wr = &v.witness_words[1];
        let am = amoo();
        let root = am.walk_init().unwrap();
        let st = walk_word(&am, &root, 0, wl).unwrap();
        assert!(!connector_exists(&am, &st, wl.len(), 2, wr));
    }

    #[test]
    fn las_and_ras_verdicts() {
        let g1 = MistakeFunction::constant(1);
        let h = Horizon::new(6, 6);
        assert!(
            check_almost_spec(&beta_golden(), &g1, AlmostSpecMode::Las, h)
                .unwrap()
                .holds()
        );
        assert!(check_almost_spec(&golden(), &g1, AlmostSpecMode::Las, h)
            .unwrap()
            .holds());
        assert!(check_almost_spec(&amoo(), &g1, AlmostSpecMode::Las, h)
            .unwrap()
            .holds());
        // golden mean is symmetric; RAS(1) holds too
        assert!(check_almost_spec(&golden(), &g1, AlmostSpecMode::Ras, h)
            .unwrap()
            .holds());
        // g = 0 is specification with tau 0; fails for the golden mean
        let g0 = MistakeFunction::constant(0);
        let v = check_almost_spec(&golden(), &g0, AlmostSpecMode::Las, h).unwrap();
        match &v.status {
            VerdictStatus::FailsWith { witnesses } => {
                assert_eq!(witnesses, &["1".to_string(), "1".to_string()]);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn bounded_density_las_with_its_own_density() {
        let g = MistakeFunction::ceil_sqrt();
        let s = make_shift(ShiftSpec::BoundedDensity { g: g.clone() }).unwrap();
        assert!(
            check_almost_spec(&s, &g, AlmostSpecMode::Las, Horizon::new(6, 6))
                .unwrap()
                .holds()
        );
    }

    #[test]
    fn as_follows_from_las() {
        let g1 = MistakeFunction::constant(1);
        let h = Horizon::new(4, 4);
        for shift in [golden(), beta_golden(), amoo(), full2()] {
            let v = check_almost_spec(&shift, &g1, AlmostSpecMode::As { segments: 3 }, h).unwrap();
            assert!(v.holds(), "{}", shift.spec().family_name());
        }
    }

    #[test]
    fn worst_case_mistakes_bounded_by_holding_budget() {
        // whenever LAS(g = m) holds at a horizon, the worst-case left
        // mistake count at that horizon is at most m
        let h = Horizon::new(5, 5);
        let fixtures: Vec<(Shift, u32)> = vec![
            (full2(), 0),
            (golden(), 1),
            (beta_golden(), 1),
            (amoo(), 1),
        ];
        for (shift, m) in fixtures {
            let v = check_almost_spec(&shift, &MistakeFunction::constant(m), AlmostSpecMode::Las, h)
                .unwrap();
            assert!(v.holds());
            let worst = max_left_mistakes(&shift, h).unwrap();
            assert!(
                worst.value <= m as usize,
                "{}: worst {} > budget {m}",
                shift.spec().family_name(),
                worst.value
            );
        }
    }

    #[test]
    fn factor_keeps_las_within_the_radius_formula() {
        // base golden mean has LAS(1); a radius-1 block code then has LAS
        // with budget 2r + m(2r+1) = 5
        let base = golden();
        let windows = crate::language::enumerate(&base, 3).unwrap();
        let entries: Vec<(Word, String)> = windows
            .words()
            .iter()
            .map(|w| {
                let ones = w.indices().iter().filter(|&&s| s == 1).count();
                (w.clone(), ones.to_string())
            })
            .collect();
        let map = crate::shift::BlockMap::new(1, entries).unwrap();
        let factor = make_shift(ShiftSpec::Factor {
            base: Box::new(base.spec().clone()),
            map,
            budget: 12,
        })
        .unwrap();
        let r = 1usize;
        let m = 1usize;
        let budget = 2 * r + m * (2 * r + 1);
        let v = check_almost_spec(
            &factor,
            &MistakeFunction::constant(budget as u32),
            AlmostSpecMode::Las,
            Horizon::new(5, 5),
        )
        .unwrap();
        assert!(v.holds());
    }

    #[test]
    fn monotonicity_in_g() {
        // if LAS(g) holds then LAS(g') holds for g' >= g
        let h = Horizon::new(5, 5);
        let v1 = check_almost_spec(&golden(), &MistakeFunction::constant(1), AlmostSpecMode::Las, h)
            .unwrap();
        let v2 = check_almost_spec(&golden(), &MistakeFunction::constant(2), AlmostSpecMode::Las, h)
            .unwrap();
        assert!(v1.holds() && v2.holds());
    }

    #[test]
    fn spanning_set_binary_n4() {
        // greedy: 0000 covers everything with <= 2 ones; the canonical
        // tie-break then picks 0111, which reaches the 5 leftovers
        let s = build_spanning_set(&Alphabet::binary(), 4, 2).unwrap();
        assert_eq!(s.words.len(), 2);
        assert!(s.verified_exhaustive);
        let r: Vec<String> = s.words.iter().map(|w| Alphabet::binary().render(w)).collect();
        assert_eq!(r, ["0000", "0111"]);
    }

    #[test]
    fn spanning_set_radius_covers_universe() {
        let a = Alphabet::digits(4);
        let s = build_spanning_set(&a, 6, 2).unwrap();
        // achieved size reported against the lemma bound
        assert!(s.bound > 1800.0 && s.bound < 1830.0);
        assert!(!s.words.is_empty());
        assert!(s.verified_exhaustive);
    }

    #[test]
    fn spanning_set_trivial_when_radius_reaches_length() {
        let s = build_spanning_set(&Alphabet::binary(), 2, 2).unwrap();
        assert_eq!(s.words.len(), 1);
    }
}
