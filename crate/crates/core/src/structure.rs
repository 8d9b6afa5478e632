//! The structural gluing construction and its consequences: refine a
//! worst-case gluing pair until the candidate set stabilizes, split the
//! language along the resulting anchor/probe words, measure the obstruction
//! collections, spot-check the closure conditions, approximate the measure
//! center, and check irreducibility.

use crate::alphabet::Word;
use crate::analysis::{hamming_ball, max_left_mistakes, Horizon, PropertyVerdict, VerdictStatus};
use crate::error::{Error, Result};
use crate::language::{visit_words, words_through};
use crate::mistake::MistakeFunction;
use crate::shift::Shift;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Output of the gluing refinement.
///
/// `tail` and `anchor0` realize the worst-case left-mistake count
/// `mistakes`; the refinement extends them to `stem`/`anchor` until the
/// candidate set stops shrinking. `probe = stem + tail` is the word core
/// words must accept on their right; `bridge = stem + y'` (y' the canonical
/// candidate) is the universal connector: whenever `x probe` is in the
/// language and `z` starts with `anchor`, `x bridge z` is in the language.
#[derive(Clone, Debug)]
pub struct Gluing {
    pub mistakes: usize,
    pub tail: Word,
    pub anchor0: Word,
    pub stem: Word,
    pub anchor: Word,
    /// Stabilized candidate set: tail perturbations that glue through
    /// stem/anchor.
    pub candidates: Vec<Word>,
    pub probe: Word,
    pub bridge: Word,
    /// Candidate-set sizes along the refinement chain (nesting check).
    pub chain: Vec<usize>,
    pub horizon: usize,
}

fn glue_candidates(
    shift: &Shift,
    ball: &[Word],
    stem: &Word,
    anchor: &Word,
) -> Vec<Word> {
    ball.iter()
        .filter(|y| shift.is_in(&stem.concat(y).concat(anchor)))
        .cloned()
        .collect()
}

/// Iteratively extend the worst pair while the candidate set shrinks; on
/// stabilization (no in-horizon extension changes the set) return the data.
pub fn build_gluing(shift: &Shift, horizon: usize) -> Result<Gluing> {
    // refinement probes reach stem + tail-perturbation + anchor
    shift.require_depth(3 * horizon)?;
    let extremum = max_left_mistakes(shift, Horizon::new(horizon, horizon))?;
    let mistakes = extremum.value;
    let tail = extremum.tail;
    let anchor0 = extremum.anchor;
    let ball = hamming_ball(shift, &tail, mistakes)?;

    let mut stem = Word::empty();
    let mut anchor = anchor0.clone();
    let mut candidates = glue_candidates(shift, &ball, &stem, &anchor);
    if candidates.is_empty() {
        return Err(Error::Internal(
            "gluing candidate set empty at the start; horizon too small".into(),
        ));
    }
    let mut chain = vec![candidates.len()];

    // extension pools: words ending with the stem that accept the tail, and
    // words starting with the anchor; canonical order, shortest first
    let all = words_through(shift, horizon)?;
    loop {
        let mut refined: Option<(Word, Word, Vec<Word>)> = None;
        'scan: for w in all.iter() {
            if !w.ends_with(&stem) || !shift.is_in(&w.concat(&tail)) {
                continue;
            }
            for v in all.iter() {
                if !v.starts_with(&anchor) {
                    continue;
                }
                let next = glue_candidates(shift, &ball, w, v);
                if next != candidates {
                    refined = Some((w.clone(), v.clone(), next));
                    break 'scan;
                }
            }
        }
        match refined {
            None => break,
            Some((w, v, next)) => {
                if next.is_empty() {
                    return Err(Error::Internal(format!(
                        "gluing candidates vanished at stem {} anchor {}",
                        shift.alphabet().render(&w),
                        shift.alphabet().render(&v)
                    )));
                }
                if !next.iter().all(|y| candidates.contains(y)) {
                    return Err(Error::Internal(
                        "gluing refinement is not nested".into(),
                    ));
                }
                chain.push(next.len());
                stem = w;
                anchor = v;
                candidates = next;
            }
        }
    }

    let probe = stem.concat(&tail);
    let bridge = stem.concat(&candidates[0]);
    Ok(Gluing {
        mistakes,
        tail,
        anchor0,
        stem,
        anchor,
        candidates,
        probe,
        bridge,
        chain,
        horizon,
    })
}

impl Gluing {
    /// Is `w` in the core collection: starts with the anchor and accepts the
    /// probe on its right.
    pub fn in_core(&self, shift: &Shift, w: &Word) -> bool {
        w.starts_with(&self.anchor) && shift.is_in(&w.concat(&self.probe))
    }

    /// The universal gluing law: if `x probe` is in the language and `z`
    /// starts with the anchor, then `x bridge z` is in the language.
    /// Checked exhaustively over the given length bounds (x also ranges over
    /// the empty word).
    pub fn verify_glue_law(&self, shift: &Shift, max_x: usize, max_z: usize) -> Result<bool> {
        shift.require_depth(max_x + self.bridge.len().max(self.probe.len()) + max_z)?;
        let mut xs = vec![Word::empty()];
        xs.extend(words_through(shift, max_x)?);
        let zs: Vec<Word> = words_through(shift, max_z)?
            .into_iter()
            .filter(|z| z.starts_with(&self.anchor))
            .collect();
        for x in &xs {
            if !shift.is_in(&x.concat(&self.probe)) {
                continue;
            }
            for z in &zs {
                if !shift.is_in(&x.concat(&self.bridge).concat(z)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Deterministic classification of a language word against a gluing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordClass {
    /// Member of the core collection.
    Core,
    /// `prefix + core + suffix` with an anchor-free prefix, a core member,
    /// and a probe-headed suffix containing the probe exactly once.
    Split {
        prefix: Word,
        core: Word,
        suffix: Word,
    },
    /// No decomposition; flags record which obstruction collections the word
    /// belongs to (anchor-free prefixes, single-probe suffixes).
    Blocked {
        anchor_free: bool,
        probe_headed: bool,
    },
}

/// Classify a word: core first, then the canonical split (leftmost anchor
/// occurrence, rightmost disjoint probe occurrence), else blocked.
pub fn classify_word(shift: &Shift, glue: &Gluing, w: &Word) -> WordClass {
    if glue.in_core(shift, w) {
        return WordClass::Core;
    }
    let anchors = w.occurrences(&glue.anchor);
    if let Some(&p) = anchors.first() {
        let probes = w.occurrences(&glue.probe);
        if let Some(&q) = probes.iter().rev().find(|&&q| q >= p + glue.anchor.len()) {
            return WordClass::Split {
                prefix: w.subword(0, p),
                core: w.subword(p, q),
                suffix: w.subword(q, w.len()),
            };
        }
    }
    WordClass::Blocked {
        anchor_free: anchors.is_empty(),
        probe_headed: w.starts_with(&glue.probe) && w.occurrences(&glue.probe).len() == 1,
    }
}

/// Per-length counts of the obstruction collections, with entropy estimates
/// and the convolution bound on undecomposable words.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ObstructionRow {
    pub n: usize,
    pub total: u128,
    /// Core members.
    pub core: u128,
    /// Split-classified words.
    pub split: u128,
    /// Blocked-classified words (partition: total = core + split + blocked).
    pub blocked: u128,
    /// Anchor-free words (the prefix obstruction collection).
    pub anchor_free: u128,
    /// Probe-headed single-probe words (the suffix obstruction collection).
    pub single_probe: u128,
    /// Words with no anchor-then-disjoint-probe pattern (the undecomposable
    /// set in the counting bound).
    pub pattern_free: u128,
    /// Words avoiding the probe entirely (enters the convolution bound).
    pub probe_free: u128,
    /// Union of the three obstruction collections.
    pub union_obstructions: u128,
    /// `pattern_free <= probe_free + sum_i anchor_free_i * probe_free_{n-i}`.
    pub convolution_bound_ok: bool,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ObstructionReport {
    pub rows: Vec<ObstructionRow>,
    /// `(1/n) ln` of the union counts at the last row, against the shift's
    /// entropy estimate there.
    pub union_estimate: f64,
    pub language_estimate: f64,
}

pub fn obstruction_report(
    shift: &Shift,
    glue: &Gluing,
    n_max: usize,
) -> Result<ObstructionReport> {
    shift.require_depth(n_max + glue.probe.len())?;
    let mut anchor_free_counts: Vec<u128> = vec![1]; // the empty word
    let mut probe_free_counts: Vec<u128> = vec![1];
    let mut rows: Vec<ObstructionRow> = Vec::new();
    for n in 1..=n_max {
        let mut total = 0u128;
        let mut core = 0u128;
        let mut split = 0u128;
        let mut blocked = 0u128;
        let mut anchor_free = 0u128;
        let mut single_probe = 0u128;
        let mut pattern_free = 0u128;
        let mut probe_free = 0u128;
        let mut union_obstructions = 0u128;
        visit_words(shift, n, &mut |w| {
            total += 1;
            match classify_word(shift, glue, w) {
                WordClass::Core => core += 1,
                WordClass::Split { .. } => split += 1,
                WordClass::Blocked { .. } => blocked += 1,
            }
            let af = !w.contains_subword(&glue.anchor);
            let pf = !w.contains_subword(&glue.probe);
            let sp = w.starts_with(&glue.probe) && w.occurrences(&glue.probe).len() == 1;
            let patterned = w
                .occurrences(&glue.anchor)
                .first()
                .map(|&p| {
                    w.occurrences(&glue.probe)
                        .iter()
                        .any(|&q| q >= p + glue.anchor.len())
                })
                .unwrap_or(false);
            anchor_free += af as u128;
            probe_free += pf as u128;
            single_probe += sp as u128;
            pattern_free += !patterned as u128;
            union_obstructions += (af || sp || !patterned) as u128;
            true
        })?;
        anchor_free_counts.push(anchor_free);
        probe_free_counts.push(probe_free);
        // |B_n| <= |C'_n| + sum_{i=0}^{n-|probe|} |C^p_i| |C'_{n-i}|
        let mut bound = probe_free;
        if n >= glue.probe.len() {
            for i in 0..=(n - glue.probe.len()) {
                bound = bound.saturating_add(
                    anchor_free_counts[i].saturating_mul(probe_free_counts[n - i]),
                );
            }
        }
        rows.push(ObstructionRow {
            n,
            total,
            core,
            split,
            blocked,
            anchor_free,
            single_probe,
            pattern_free,
            probe_free,
            union_obstructions,
            convolution_bound_ok: pattern_free <= bound,
        });
    }
    let last = rows.last().ok_or(Error::EmptyCollection)?;
    let est = |c: u128, n: usize| {
        if c == 0 {
            f64::NEG_INFINITY
        } else {
            (c as f64).ln() / n as f64
        }
    };
    Ok(ObstructionReport {
        union_estimate: est(last.union_obstructions, last.n),
        language_estimate: est(last.total, last.n),
        rows,
    })
}

/// Sampled verification of the closure conditions: core gluing (pairs of
/// core words joined by the bridge stay in the core), and the two
/// interval-closure conditions on periodized points with separation at
/// least the anchor length.
pub fn check_closure_conditions(
    shift: &Shift,
    glue: &Gluing,
    samples: usize,
    seed: u64,
) -> Result<PropertyVerdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let render = |w: &Word| shift.alphabet().render(w);
    let mut fail: Option<(String, Vec<Word>)> = None;
    let mut exercised_glue = 0usize;
    let mut exercised_intervals = 0usize;

    // pool of core words up to a modest length
    let mut cores: Vec<Word> = Vec::new();
    for n in 1..=glue.horizon {
        visit_words(shift, n, &mut |w| {
            if glue.in_core(shift, w) {
                cores.push(w.clone());
            }
            true
        })?;
    }
    if cores.is_empty() {
        return Ok(PropertyVerdict {
            property: "closure-conditions".into(),
            status: VerdictStatus::Inconclusive {
                reason: "no core words at this horizon".into(),
            },
            horizon: vec![glue.horizon],
            params: vec![],
            witness_words: vec![],
        });
    }

    // condition: w bridge w' lands back in the core
    for _ in 0..samples {
        let w = &cores[rng.random_range(0..cores.len())];
        let w2 = &cores[rng.random_range(0..cores.len())];
        exercised_glue += 1;
        let joined = w.concat(&glue.bridge).concat(w2);
        if !glue.in_core(shift, &joined) {
            fail = Some(("core-gluing".into(), vec![w.clone(), w2.clone()]));
            break;
        }
    }

    // interval closures on periodized words
    if fail.is_none() {
        let mut period_words: Vec<Word> = Vec::new();
        for n in 1..=glue.horizon.min(6) {
            let pts = crate::entropy::periodic_points(shift, n)?;
            period_words.extend(pts.words);
        }
        if !period_words.is_empty() {
            let sep = glue.anchor.len();
            for _ in 0..samples {
                let p = &period_words[rng.random_range(0..period_words.len())];
                let reps = (4 * glue.horizon).div_ceil(p.len()).max(2);
                let x = p.repeat(reps);
                let len = x.len();
                if len <= sep + 1 {
                    continue;
                }
                // i <= j <= k <= l with k - j >= sep
                let j = rng.random_range(0..len - sep);
                let k = rng.random_range(j + sep..len);
                let i = rng.random_range(0..=j);
                let l = rng.random_range(k..len);
                let seg_ik = x.subword(i, k + 1);
                let seg_jl = x.subword(j, l + 1);
                let in_ik = glue.in_core(shift, &seg_ik);
                let in_jl = glue.in_core(shift, &seg_jl);
                if in_ik && in_jl {
                    exercised_intervals += 1;
                    let seg_jk = x.subword(j, k + 1);
                    if !glue.in_core(shift, &seg_jk) {
                        fail = Some(("interval-intersection".into(), vec![seg_ik, seg_jl, seg_jk]));
                        break;
                    }
                    // union form needs a <= i with x([a,l]) in the core
                    let a = rng.random_range(0..=i);
                    let seg_al = x.subword(a, l + 1);
                    if glue.in_core(shift, &seg_al) {
                        let seg_il = x.subword(i, l + 1);
                        if !glue.in_core(shift, &seg_il) {
                            fail =
                                Some(("interval-union".into(), vec![seg_ik, seg_jl, seg_al, seg_il]));
                            break;
                        }
                    }
                }
            }
        }
    }

    let params = vec![
        ("samples".to_string(), samples.to_string()),
        ("glue_instances".to_string(), exercised_glue.to_string()),
        (
            "interval_instances".to_string(),
            exercised_intervals.to_string(),
        ),
        ("seed".to_string(), seed.to_string()),
    ];
    Ok(match fail {
        None => PropertyVerdict {
            property: "closure-conditions".into(),
            status: VerdictStatus::Holds,
            horizon: vec![glue.horizon],
            params,
            witness_words: vec![],
        },
        Some((which, words)) => PropertyVerdict {
            property: "closure-conditions".into(),
            status: VerdictStatus::FailsWith {
                witnesses: std::iter::once(which)
                    .chain(words.iter().map(render))
                    .collect(),
            },
            horizon: vec![glue.horizon],
            params,
            witness_words: words,
        },
    })
}

/// `gcd { |w| + |probe| : w core word, |w| <= n_max }`.
pub fn core_length_gcd(shift: &Shift, glue: &Gluing, n_max: usize) -> Result<Option<usize>> {
    let mut g: Option<usize> = None;
    for n in 1..=n_max {
        let mut seen = false;
        visit_words(shift, n, &mut |w| {
            if glue.in_core(shift, w) {
                seen = true;
                false
            } else {
                true
            }
        })?;
        if seen {
            let value = n + glue.probe.len();
            g = Some(match g {
                None => value,
                Some(cur) => gcd(cur, value),
            });
            if g == Some(1) {
                break;
            }
        }
    }
    Ok(g)
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Finite-horizon approximation of the measure center's language: a word
/// survives when some word in `L_{<=search_len}` contains `g(|w|) + 1`
/// disjoint occurrences of it (greedy leftmost counting). Failure to find a
/// witness within the search length may over-flag obstructions, so the kept
/// sets under-approximate in that direction.
#[derive(Clone, Debug)]
pub struct MeasureCenterApprox {
    /// Kept words per length `1..=n_max`.
    pub kept: Vec<Vec<Word>>,
    /// Flagged obstructions per length (complement of kept within the
    /// language slice).
    pub flagged: Vec<Vec<Word>>,
    pub search_len: usize,
}

pub fn measure_center_approx(
    shift: &Shift,
    g: &MistakeFunction,
    search_len: usize,
    n_max: usize,
) -> Result<MeasureCenterApprox> {
    shift.require_depth(search_len.max(n_max))?;
    let mut kept = Vec::with_capacity(n_max);
    let mut flagged = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let slice = crate::language::enumerate(shift, n)?;
        let results: Vec<bool> = slice
            .words()
            .par_iter()
            .map(|u| survives(shift, g, u, search_len))
            .collect();
        let mut k = Vec::new();
        let mut f = Vec::new();
        for (w, ok) in slice.words().iter().zip(results) {
            if ok {
                k.push(w.clone());
            } else {
                f.push(w.clone());
            }
        }
        kept.push(k);
        flagged.push(f);
    }
    Ok(MeasureCenterApprox {
        kept,
        flagged,
        search_len,
    })
}

fn survives(shift: &Shift, g: &MistakeFunction, u: &Word, search_len: usize) -> bool {
    // fast path: pure repetitions
    for k in 2.. {
        let len = k * u.len();
        if len > search_len {
            break;
        }
        if g.eval(len) < k {
            if shift.is_in(&u.repeat(k)) {
                return true;
            }
            break;
        }
    }
    // full search per witness length
    for len in u.len()..=search_len {
        let needed = g.eval(len) + 1;
        if needed * u.len() > len {
            continue;
        }
        if witness_dfs(shift, u, len, needed) {
            return true;
        }
    }
    false
}

/// DFS over `L_len` prefixes tracking the greedy-leftmost disjoint count of
/// `u`; prunes branches that cannot reach the required count.
fn witness_dfs(shift: &Shift, u: &Word, len: usize, needed: usize) -> bool {
    let Some(root) = shift.walk_init() else {
        return false;
    };
    let mut buf = Word::empty();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        shift: &Shift,
        u: &Word,
        len: usize,
        needed: usize,
        walk: &crate::shift::Walk,
        buf: &mut Word,
        count: usize,
        next_start: usize,
    ) -> bool {
        if count >= needed {
            return true;
        }
        let pos = buf.len();
        // prune: remaining room cannot fit the missing occurrences
        if count + (len - pos) / u.len() < needed {
            return false;
        }
        for a in 0..shift.alphabet().len() as u8 {
            buf.push(a);
            if let Some(st) = shift.walk_push(walk, pos, a) {
                let mut c = count;
                let mut ns = next_start;
                let end = buf.len();
                if end >= next_start + u.len() && buf.ends_with(u) {
                    c += 1;
                    ns = end;
                }
                if rec(shift, u, len, needed, &st, buf, c, ns) {
                    buf.pop();
                    return true;
                }
            }
            buf.pop();
        }
        false
    }
    rec(shift, u, len, needed, &root, &mut buf, 0, 0)
}

/// Irreducibility at a finite horizon: every pair of words joins with a
/// connector of length at most `gap_bound`; the minimal connector per pair
/// is recorded.
#[derive(Clone, Debug)]
pub struct IrreducibilityReport {
    pub verdict: PropertyVerdict,
    /// `(left, right, connector)` triples in canonical pair order.
    pub witnesses: Vec<(Word, Word, Word)>,
}

pub fn check_irreducible(
    shift: &Shift,
    horizon: usize,
    gap_bound: usize,
) -> Result<IrreducibilityReport> {
    shift.require_depth(2 * horizon + gap_bound)?;
    let words = words_through(shift, horizon)?;
    let Some(root) = shift.walk_init() else {
        return Err(Error::EmptyShift);
    };
    let results: Vec<(usize, usize, Option<Word>)> = (0..words.len())
        .into_par_iter()
        .flat_map_iter(|ui| {
            let u = &words[ui];
            let ustate = walk_to(shift, &root, u);
            words.iter().enumerate().map(move |(vi, v)| {
                let conn = ustate
                    .as_ref()
                    .and_then(|st| min_connector(shift, st, u.len(), v, gap_bound));
                (ui, vi, conn)
            })
        })
        .collect();
    let mut witnesses = Vec::with_capacity(results.len());
    let mut fail: Option<(usize, usize)> = None;
    for (ui, vi, conn) in results {
        match conn {
            Some(c) => witnesses.push((words[ui].clone(), words[vi].clone(), c)),
            None => {
                if fail.is_none_or(|f| (ui, vi) < f) {
                    fail = Some((ui, vi));
                }
            }
        }
    }
    let params = vec![("gap_bound".to_string(), gap_bound.to_string())];
    let verdict = match fail {
        None => PropertyVerdict {
            property: "irreducible".into(),
            status: VerdictStatus::Holds,
            horizon: vec![horizon],
            params,
            witness_words: vec![],
        },
        Some((ui, vi)) => {
            let ws = vec![words[ui].clone(), words[vi].clone()];
            let status = if shift.is_exact() {
                VerdictStatus::FailsWith {
                    witnesses: ws.iter().map(|w| shift.alphabet().render(w)).collect(),
                }
            } else {
                VerdictStatus::Inconclusive {
                    reason: format!(
                        "no connector certified for ({}, {})",
                        shift.alphabet().render(&ws[0]),
                        shift.alphabet().render(&ws[1])
                    ),
                }
            };
            PropertyVerdict {
                property: "irreducible".into(),
                status,
                horizon: vec![horizon],
                params,
                witness_words: ws,
            }
        }
    };
    Ok(IrreducibilityReport { verdict, witnesses })
}

fn walk_to(shift: &Shift, root: &crate::shift::Walk, w: &Word) -> Option<crate::shift::Walk> {
    let mut cur = root.clone();
    for i in 0..w.len() {
        cur = shift.walk_push(&cur, i, w.get(i))?;
    }
    Some(cur)
}

/// Smallest connector (length-then-lex) with `u w v` in the language.
fn min_connector(
    shift: &Shift,
    ustate: &crate::shift::Walk,
    ulen: usize,
    v: &Word,
    gap_bound: usize,
) -> Option<Word> {
    fn rec(
        shift: &Shift,
        st: &crate::shift::Walk,
        pos: usize,
        left: usize,
        v: &Word,
        buf: &mut Word,
    ) -> bool {
        if left == 0 {
            if let Some(end) = walk_suffix(shift, st, pos, v) {
                return shift.walk_accepts(&end, pos + v.len());
            }
            return false;
        }
        for a in 0..shift.alphabet().len() as u8 {
            if let Some(next) = shift.walk_push(st, pos, a) {
                buf.push(a);
                if rec(shift, &next, pos + 1, left - 1, v, buf) {
                    return true;
                }
                buf.pop();
            }
        }
        false
    }
    for gap in 0..=gap_bound {
        let mut buf = Word::empty();
        if rec(shift, ustate, ulen, gap, v, &mut buf) {
            return Some(buf);
        }
    }
    None
}

fn walk_suffix(
    shift: &Shift,
    st: &crate::shift::Walk,
    offset: usize,
    v: &Word,
) -> Option<crate::shift::Walk> {
    let mut cur = st.clone();
    for i in 0..v.len() {
        cur = shift.walk_push(&cur, offset + i, v.get(i))?;
    }
    Some(cur)
}
