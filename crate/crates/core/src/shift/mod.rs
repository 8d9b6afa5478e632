//! Subshift families: specifications, validated membership oracles, and the
//! incremental prefix walkers the enumeration engine runs on.
//!
//! Every oracle here answers for the *extendable* language: a word is `In`
//! exactly when it occurs in a bi-infinite point of the shift. Families with
//! window-local definitions (full, SFT, beta, S-gap, bounded-density,
//! at-most-one-1, products, factors) decide this exactly; coded shifts are
//! decided up to a search horizon and may answer `Unknown`.

mod beta;
mod coded;
mod combinators;
mod sft;
mod sgap;

pub use beta::{greedy_expansion_digits, BetaOracle, Expansion};
pub use coded::{CodedAutomaton, CodedOracle, SignStructure};
pub use combinators::{BlockMap, FactorOracle};
pub use sft::SftOracle;
pub use sgap::GapSet;

use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::mistake::MistakeFunction;
use smallvec::SmallVec;
use std::sync::OnceLock;

/// Result of a language membership query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    /// Only horizon-limited oracles (coded shifts) return this; the payload
    /// is the search horizon that was exhausted.
    Unknown { horizon: usize },
}

impl Membership {
    pub fn is_in(&self) -> bool {
        matches!(self, Membership::In)
    }
    pub fn is_out(&self) -> bool {
        matches!(self, Membership::Out)
    }
    pub fn is_unknown(&self) -> bool {
        matches!(self, Membership::Unknown { .. })
    }
}

/// Description of a subshift: the family tag plus its parameters. This is the
/// unit the whole system operates on; validate with [`make_shift`].
#[derive(Clone, Debug, PartialEq)]
pub enum ShiftSpec {
    /// Full shift over the given alphabet.
    Full { alphabet: Alphabet },
    /// Subshift of finite type with a finite forbidden-word list.
    Sft { alphabet: Alphabet, forbidden: Vec<Word> },
    /// Beta shift given by the (eventually periodic) expansion digits of 1.
    Beta { expansion: Expansion },
    /// S-gap shift: gap lengths between successive 1s lie in the set.
    SGap { gaps: GapSet },
    /// Bounded-density shift: every length-k window has at most g(k) ones.
    BoundedDensity { g: MistakeFunction },
    /// Binary sequences with at most one 1 in total.
    AtMostOneOne,
    /// Coded shift generated by concatenations of the given words.
    Coded {
        alphabet: Alphabet,
        generators: Vec<Word>,
        /// Membership search allows total concatenation overhang up to
        /// `horizon_factor * |w|`.
        horizon_factor: u32,
        /// When set, the generator list is the entire generating set and
        /// failed embeddings are definitive `Out`s; otherwise they are
        /// `Unknown`.
        complete: bool,
    },
    /// Product shift over the pair alphabet.
    Product { left: Box<ShiftSpec>, right: Box<ShiftSpec> },
    /// Sliding-block-code factor of a base shift.
    Factor {
        base: Box<ShiftSpec>,
        map: BlockMap,
        /// Lengths up to this budget are materialized; membership beyond it
        /// is an explicit error.
        budget: usize,
    },
}

impl ShiftSpec {
    pub fn family_name(&self) -> &'static str {
        match self {
            ShiftSpec::Full { .. } => "full",
            ShiftSpec::Sft { .. } => "sft",
            ShiftSpec::Beta { .. } => "beta",
            ShiftSpec::SGap { .. } => "s-gap",
            ShiftSpec::BoundedDensity { .. } => "bounded-density",
            ShiftSpec::AtMostOneOne => "at-most-one-one",
            ShiftSpec::Coded { .. } => "coded",
            ShiftSpec::Product { .. } => "product",
            ShiftSpec::Factor { .. } => "factor",
        }
    }

    /// Canonical byte serialization used for fingerprinting and cache keys.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_canonical(&mut out);
        out
    }

    fn write_canonical(&self, out: &mut Vec<u8>) {
        fn put_str(out: &mut Vec<u8>, s: &str) {
            out.extend_from_slice(&(s.len() as u32).to_le_bytes());
            out.extend_from_slice(s.as_bytes());
        }
        fn put_alphabet(out: &mut Vec<u8>, a: &Alphabet) {
            out.extend_from_slice(&(a.len() as u32).to_le_bytes());
            for s in a.symbols() {
                put_str(out, s);
            }
            match a.labels() {
                None => out.push(0),
                Some(ls) => {
                    out.push(1);
                    for l in ls {
                        out.extend_from_slice(&l.to_le_bytes());
                    }
                }
            }
        }
        fn put_word(out: &mut Vec<u8>, w: &Word) {
            out.extend_from_slice(&(w.len() as u32).to_le_bytes());
            out.extend_from_slice(w.indices());
        }
        put_str(out, self.family_name());
        match self {
            ShiftSpec::Full { alphabet } => put_alphabet(out, alphabet),
            ShiftSpec::Sft { alphabet, forbidden } => {
                put_alphabet(out, alphabet);
                out.extend_from_slice(&(forbidden.len() as u32).to_le_bytes());
                for w in forbidden {
                    put_word(out, w);
                }
            }
            ShiftSpec::Beta { expansion } => {
                out.extend_from_slice(&(expansion.preperiod().len() as u32).to_le_bytes());
                out.extend_from_slice(expansion.preperiod());
                out.extend_from_slice(&(expansion.period().len() as u32).to_le_bytes());
                out.extend_from_slice(expansion.period());
            }
            ShiftSpec::SGap { gaps } => match gaps {
                GapSet::Finite { values: set } => {
                    out.push(0);
                    out.extend_from_slice(&(set.len() as u32).to_le_bytes());
                    for g in set {
                        out.extend_from_slice(&g.to_le_bytes());
                    }
                }
                GapSet::Cofinite { excluded } => {
                    out.push(1);
                    out.extend_from_slice(&(excluded.len() as u32).to_le_bytes());
                    for g in excluded {
                        out.extend_from_slice(&g.to_le_bytes());
                    }
                }
            },
            ShiftSpec::BoundedDensity { g } => put_str(out, &g.describe()),
            ShiftSpec::AtMostOneOne => {}
            ShiftSpec::Coded {
                alphabet,
                generators,
                horizon_factor,
                complete,
            } => {
                put_alphabet(out, alphabet);
                out.extend_from_slice(&horizon_factor.to_le_bytes());
                out.push(*complete as u8);
                out.extend_from_slice(&(generators.len() as u32).to_le_bytes());
                for w in generators {
                    put_word(out, w);
                }
            }
            ShiftSpec::Product { left, right } => {
                left.write_canonical(out);
                right.write_canonical(out);
            }
            ShiftSpec::Factor { base, map, budget } => {
                base.write_canonical(out);
                out.extend_from_slice(&(map.radius() as u32).to_le_bytes());
                put_alphabet(out, map.target());
                out.extend_from_slice(&(map.table().len() as u32).to_le_bytes());
                for (w, t) in map.table() {
                    put_word(out, w);
                    out.push(*t);
                }
                out.extend_from_slice(&(*budget as u32).to_le_bytes());
            }
        }
    }
}

pub(crate) enum ShiftKind {
    Full,
    Sft(SftOracle),
    Beta(BetaOracle),
    SGap(GapSet),
    Density(MistakeFunction),
    AtMostOneOne,
    Coded(CodedOracle),
    Product(Box<Shift>, Box<Shift>),
    Factor(FactorOracle),
}

/// A validated shift: a [`ShiftSpec`] together with its membership oracle.
pub struct Shift {
    spec: ShiftSpec,
    alphabet: Alphabet,
    kind: ShiftKind,
    fingerprint: OnceLock<String>,
}

/// Validate a [`ShiftSpec`] and build its membership oracle.
pub fn make_shift(spec: ShiftSpec) -> Result<Shift> {
    let (alphabet, kind) = match &spec {
        ShiftSpec::Full { alphabet } => (alphabet.clone(), ShiftKind::Full),
        ShiftSpec::Sft { alphabet, forbidden } => {
            let oracle = SftOracle::build(alphabet.clone(), forbidden.clone())?;
            (alphabet.clone(), ShiftKind::Sft(oracle))
        }
        ShiftSpec::Beta { expansion } => {
            let oracle = BetaOracle::build(expansion.clone())?;
            let a = oracle.alphabet().clone();
            (a, ShiftKind::Beta(oracle))
        }
        ShiftSpec::SGap { gaps } => {
            gaps.validate()?;
            (Alphabet::binary(), ShiftKind::SGap(gaps.clone()))
        }
        ShiftSpec::BoundedDensity { g } => {
            (Alphabet::binary(), ShiftKind::Density(g.clone()))
        }
        ShiftSpec::AtMostOneOne => (Alphabet::binary(), ShiftKind::AtMostOneOne),
        ShiftSpec::Coded {
            alphabet,
            generators,
            horizon_factor,
            complete,
        } => {
            let oracle = CodedOracle::build(
                alphabet.clone(),
                generators,
                *horizon_factor,
                *complete,
                None,
            )?;
            (alphabet.clone(), ShiftKind::Coded(oracle))
        }
        ShiftSpec::Product { left, right } => {
            let l = make_shift((**left).clone())?;
            let r = make_shift((**right).clone())?;
            if !l.is_exact() || !r.is_exact() {
                return Err(Error::InvalidSpec(
                    "product components must have exact oracles".into(),
                ));
            }
            let alphabet = combinators::pair_alphabet(l.alphabet(), r.alphabet())?;
            (alphabet, ShiftKind::Product(Box::new(l), Box::new(r)))
        }
        ShiftSpec::Factor { base, map, budget } => {
            let b = make_shift((**base).clone())?;
            if !b.is_exact() {
                return Err(Error::InvalidSpec(
                    "factor base must have an exact oracle".into(),
                ));
            }
            let oracle = FactorOracle::build(b, map.clone(), *budget)?;
            let a = oracle.target_alphabet().clone();
            (a, ShiftKind::Factor(oracle))
        }
    };
    Ok(Shift {
        spec,
        alphabet,
        kind,
        fingerprint: OnceLock::new(),
    })
}

/// Build a coded shift whose oracle also carries a structural upper bound
/// (used by the counterexample construction).
pub(crate) fn make_coded_with_upper(
    alphabet: Alphabet,
    generators: Vec<Word>,
    horizon_factor: u32,
    complete: bool,
    upper: SignStructure,
) -> Result<Shift> {
    let oracle = CodedOracle::build(
        alphabet.clone(),
        &generators,
        horizon_factor,
        complete,
        Some(upper),
    )?;
    let spec = ShiftSpec::Coded {
        alphabet: alphabet.clone(),
        generators,
        horizon_factor,
        complete,
    };
    Ok(Shift {
        spec,
        alphabet,
        kind: ShiftKind::Coded(oracle),
        fingerprint: OnceLock::new(),
    })
}

/// Incremental prefix state for depth-first language walks. A walker only
/// exists for prefixes that are genuinely in the language (extendable), so
/// enumeration never emits locally-admissible-but-dead words.
///
/// States are self-contained (the factor walker carries its own image
/// prefix), so a state plus the prefix length fully determines all legal
/// continuations; analysis sweeps exploit this by grouping left words with
/// equal states.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Walk {
    Trivial,
    Sft(sft::SftWalk),
    Beta(SmallVec<[u32; 8]>),
    SGap { seen_one: bool, run: u32 },
    Density(SmallVec<[u32; 12]>),
    Amoo { seen_one: bool },
    Pair(Box<Walk>, Box<Walk>),
    Image(Word),
    Coded(Vec<u32>),
}

impl Shift {
    pub fn spec(&self) -> &ShiftSpec {
        &self.spec
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub(crate) fn kind(&self) -> &ShiftKind {
        &self.kind
    }

    /// True when membership never returns `Unknown`.
    pub fn is_exact(&self) -> bool {
        match &self.kind {
            ShiftKind::Coded(c) => c.complete(),
            ShiftKind::Product(l, r) => l.is_exact() && r.is_exact(),
            ShiftKind::Factor(f) => f.base().is_exact(),
            _ => true,
        }
    }

    /// True when the shift has no points at all (e.g. a fully pruned SFT).
    pub fn is_empty_shift(&self) -> bool {
        match &self.kind {
            ShiftKind::Sft(s) => s.is_empty_shift(),
            ShiftKind::Coded(c) => c.is_empty_shift(),
            ShiftKind::Product(l, r) => l.is_empty_shift() || r.is_empty_shift(),
            ShiftKind::Factor(f) => f.base().is_empty_shift(),
            _ => false,
        }
    }

    /// Longest word this oracle can decide, when bounded (factor shifts and
    /// anything built over them). `None` means unbounded.
    pub fn max_word_len(&self) -> Option<usize> {
        match &self.kind {
            ShiftKind::Factor(f) => Some(f.budget()),
            ShiftKind::Product(l, r) => match (l.max_word_len(), r.max_word_len()) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) | (None, Some(a)) => Some(a),
                (None, None) => None,
            },
            _ => None,
        }
    }

    /// Guard for sweeps that will query words up to `needed` symbols.
    pub fn require_depth(&self, needed: usize) -> Result<()> {
        if let Some(budget) = self.max_word_len() {
            if needed > budget {
                return Err(Error::BudgetExceeded {
                    requested: needed,
                    budget,
                });
            }
        }
        Ok(())
    }

    /// Hex fingerprint of the canonical spec serialization.
    pub fn fingerprint(&self) -> &str {
        self.fingerprint.get_or_init(|| {
            use sha2::{Digest, Sha256};
            let mut h = Sha256::new();
            h.update(self.spec.canonical_bytes());
            let d = h.finalize();
            d.iter().map(|b| format!("{b:02x}")).collect()
        })
    }

    /// Exact language membership (validated input). Querying a factor shift
    /// beyond its materialization budget is an explicit error.
    pub fn contains(&self, w: &Word) -> Result<Membership> {
        self.alphabet.validate_word(w)?;
        if let ShiftKind::Factor(f) = &self.kind {
            if w.len() > f.budget() {
                return Err(Error::BudgetExceeded {
                    requested: w.len(),
                    budget: f.budget(),
                });
            }
        }
        Ok(self.membership(w))
    }

    /// Membership without input validation; indices must be in range.
    pub fn membership(&self, w: &Word) -> Membership {
        if w.is_empty() {
            return if self.is_empty_shift() {
                Membership::Out
            } else {
                Membership::In
            };
        }
        match &self.kind {
            ShiftKind::Coded(c) => c.membership(w),
            ShiftKind::Factor(f) => f.membership(w),
            _ => {
                let Some(mut walk) = self.walk_init() else {
                    return Membership::Out;
                };
                for pos in 0..w.len() {
                    match self.walk_push(&walk, pos, w.get(pos)) {
                        Some(next) => walk = next,
                        None => return Membership::Out,
                    }
                }
                Membership::In
            }
        }
    }

    /// Convenience: membership is `In`.
    pub fn is_in(&self, w: &Word) -> bool {
        self.membership(w).is_in()
    }

    /// Initial walker state; `None` when the shift is empty.
    pub(crate) fn walk_init(&self) -> Option<Walk> {
        if self.is_empty_shift() {
            return None;
        }
        Some(match &self.kind {
            ShiftKind::Full => Walk::Trivial,
            ShiftKind::Sft(s) => Walk::Sft(s.walk_init()),
            ShiftKind::Beta(_) => Walk::Beta(SmallVec::new()),
            ShiftKind::SGap(_) => Walk::SGap {
                seen_one: false,
                run: 0,
            },
            ShiftKind::Density(_) => Walk::Density(SmallVec::new()),
            ShiftKind::AtMostOneOne => Walk::Amoo { seen_one: false },
            ShiftKind::Product(l, r) => Walk::Pair(
                Box::new(l.walk_init().expect("nonempty component")),
                Box::new(r.walk_init().expect("nonempty component")),
            ),
            ShiftKind::Factor(_) => Walk::Image(Word::empty()),
            ShiftKind::Coded(c) => Walk::Coded(c.walk_init()),
        })
    }

    /// Advance a walker by the symbol at `pos` (0-based within the walked
    /// word). Returns `None` when the extended prefix leaves the (decided)
    /// language.
    pub(crate) fn walk_push(&self, walk: &Walk, pos: usize, sym: u8) -> Option<Walk> {
        match (&self.kind, walk) {
            (ShiftKind::Full, Walk::Trivial) => Some(Walk::Trivial),
            (ShiftKind::Sft(s), Walk::Sft(st)) => s.walk_push(st, sym).map(Walk::Sft),
            (ShiftKind::Beta(b), Walk::Beta(tight)) => b.walk_push(tight, sym).map(Walk::Beta),
            (ShiftKind::SGap(gaps), Walk::SGap { seen_one, run }) => {
                sgap_push(gaps, *seen_one, *run, sym)
            }
            (ShiftKind::Density(g), Walk::Density(ones)) => {
                density_push(g, ones, pos, sym).map(Walk::Density)
            }
            (ShiftKind::AtMostOneOne, Walk::Amoo { seen_one }) => {
                if sym == 1 {
                    if *seen_one {
                        None
                    } else {
                        Some(Walk::Amoo { seen_one: true })
                    }
                } else {
                    Some(Walk::Amoo {
                        seen_one: *seen_one,
                    })
                }
            }
            (ShiftKind::Product(l, r), Walk::Pair(wl, wr)) => {
                let (sl, sr) = combinators::split_pair_symbol(&self.alphabet, l.alphabet(), r.alphabet(), sym);
                let nl = l.walk_push(wl, pos, sl)?;
                let nr = r.walk_push(wr, pos, sr)?;
                Some(Walk::Pair(Box::new(nl), Box::new(nr)))
            }
            (ShiftKind::Factor(f), Walk::Image(prefix)) => {
                let mut next = prefix.clone();
                next.push(sym);
                f.image_prefix_ok(&next).then_some(Walk::Image(next))
            }
            (ShiftKind::Coded(c), Walk::Coded(pads)) => c.walk_push(pads, sym).map(Walk::Coded),
            _ => unreachable!("walker/shift kind mismatch"),
        }
    }

    /// Can a word ending at this walker state be considered complete? Always
    /// true for exact families; for coded shifts this checks the padding
    /// budget at the given word length.
    pub(crate) fn walk_accepts(&self, walk: &Walk, len: usize) -> bool {
        match (&self.kind, walk) {
            (ShiftKind::Coded(c), Walk::Coded(pads)) => c.accepts(pads, len),
            _ => true,
        }
    }

    /// Family window bound used for exact periodization, when one exists.
    pub(crate) fn periodize(&self, w: &Word) -> Result<(bool, bool)> {
        periodize_impl(self, w)
    }
}

fn sgap_push(gaps: &GapSet, seen_one: bool, run: u32, sym: u8) -> Option<Walk> {
    if sym == 0 {
        let run = run + 1;
        if gaps.boundary_ok(run) {
            Some(Walk::SGap { seen_one, run })
        } else {
            None
        }
    } else if seen_one {
        if gaps.member(run) {
            Some(Walk::SGap {
                seen_one: true,
                run: 0,
            })
        } else {
            None
        }
    } else {
        // leading truncated gap: admissible as the suffix of an allowed gap
        if gaps.boundary_ok(run) {
            Some(Walk::SGap {
                seen_one: true,
                run: 0,
            })
        } else {
            None
        }
    }
}

fn density_push(
    g: &MistakeFunction,
    ones: &SmallVec<[u32; 12]>,
    pos: usize,
    sym: u8,
) -> Option<SmallVec<[u32; 12]>> {
    if sym == 0 {
        // windows ending in a 0 only grow; g is nondecreasing, so no new
        // violation is possible
        return Some(ones.clone());
    }
    let p = (pos + 1) as u32;
    let mut next = ones.clone();
    next.push(p);
    for (idx, &q) in next.iter().enumerate() {
        let count = next.len() - idx;
        let window = (p - q + 1) as usize;
        if count > g.eval(window) {
            return None;
        }
    }
    Some(next)
}

/// Period check for a candidate word: does `w^\infty` lie in the shift?
/// Returns `(periodizes, exact)`; `exact = false` means the answer is
/// horizon-limited (coded shifts and factors) and `periodizes = true` only
/// reflects all checked powers.
fn periodize_impl(shift: &Shift, w: &Word) -> Result<(bool, bool)> {
    if w.is_empty() {
        return Err(Error::InvalidSpec("period word must be nonempty".into()));
    }
    shift.alphabet().validate_word(w)?;
    if shift.is_empty_shift() {
        return Ok((false, true));
    }
    let n = w.len();
    match shift.kind() {
        ShiftKind::Full => Ok((true, true)),
        ShiftKind::Sft(s) => {
            // all cyclic windows appear once the repetition covers n + window
            let window = s.window();
            let m = (n + window).div_ceil(n).max(2);
            Ok((shift.is_in(&w.repeat(m)), true))
        }
        ShiftKind::Beta(b) => Ok((b.periodizes(w), true)),
        ShiftKind::SGap(gaps) => {
            let ones: Vec<usize> = (0..n).filter(|&i| w.get(i) == 1).collect();
            if ones.is_empty() {
                return Ok((gaps.unbounded(), true));
            }
            // cyclic gaps: between consecutive ones, wrapping around
            for k in 0..ones.len() {
                let a = ones[k];
                let b = if k + 1 < ones.len() {
                    ones[k + 1]
                } else {
                    ones[0] + n
                };
                if !gaps.member((b - a - 1) as u32) {
                    return Ok((false, true));
                }
            }
            Ok((true, true))
        }
        ShiftKind::Density(_) | ShiftKind::AtMostOneOne => {
            // sublinear density: any 1 in the period eventually overflows
            // every window budget, so only the all-zero word periodizes
            Ok((w.indices().iter().all(|&s| s == 0), true))
        }
        ShiftKind::Product(l, r) => {
            let (wl, wr) = combinators::project_pair_word(shift.alphabet(), l.alphabet(), r.alphabet(), w);
            let (pl, el) = l.periodize(&wl)?;
            if !pl {
                return Ok((false, el));
            }
            let (pr, er) = r.periodize(&wr)?;
            Ok((pl && pr, el && er))
        }
        ShiftKind::Coded(c) => {
            // test powers within the materialized horizon
            let max_len = c.max_query_len(n);
            let mut m = 2;
            loop {
                let len = m * n;
                if len > max_len {
                    return Ok((true, false));
                }
                match shift.membership(&w.repeat(m)) {
                    Membership::Out => return Ok((false, true)),
                    Membership::Unknown { .. } => return Ok((true, false)),
                    Membership::In => {}
                }
                m += 1;
            }
        }
        ShiftKind::Factor(f) => {
            let budget = f.budget();
            let mut m = 2;
            loop {
                if m * n > budget {
                    return Ok((true, false));
                }
                if !shift.is_in(&w.repeat(m)) {
                    return Ok((false, true));
                }
                m += 1;
            }
        }
    }
}
