//! Coded shifts: membership for subwords of bi-infinite concatenations of a
//! generator set.
//!
//! The materialized generators compile to a minimal acyclic DFA; membership
//! asks whether the word can be read inside a concatenation path (start
//! anywhere inside a generator, jump back to the start at generator ends).
//! The left/right overhang of the covering concatenation is tracked as
//! "padding" and capped by the configured horizon. A failed search is `Out`
//! when the generator list is complete, otherwise `Unknown` unless a
//! structural side-condition already rules the word out.

use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};
use crate::shift::Membership;
use std::collections::HashMap;

const NONE: u32 = u32::MAX;
const INF: u32 = u32::MAX;

/// Minimal acyclic automaton of the generator set plus flower data.
pub struct CodedAutomaton {
    n_sym: usize,
    /// `trans[q * n_sym + a]` = child or NONE
    trans: Vec<u32>,
    is_end: Vec<bool>,
    /// Min trie depth at which this state occurs (left padding when a read
    /// starts here).
    min_depth: Vec<u32>,
    /// Min symbols to finish the current generator from this state.
    completion: Vec<u32>,
}

impl CodedAutomaton {
    pub fn node_count(&self) -> usize {
        self.is_end.len()
    }

    fn build(alphabet: &Alphabet, generators: &[Word]) -> Result<CodedAutomaton> {
        let n_sym = alphabet.len();
        // trie
        let mut children: Vec<Vec<u32>> = vec![vec![NONE; n_sym]];
        let mut end: Vec<bool> = vec![false];
        for g in generators {
            if g.is_empty() {
                return Err(Error::InvalidSpec("generators must be nonempty".into()));
            }
            alphabet.validate_word(g)?;
            let mut q = 0usize;
            for &a in g.indices() {
                let next = children[q][a as usize];
                if next == NONE {
                    let id = children.len() as u32;
                    children.push(vec![NONE; n_sym]);
                    end.push(false);
                    children[q][a as usize] = id;
                    q = id as usize;
                } else {
                    q = next as usize;
                }
            }
            end[q] = true;
        }

        // bottom-up hash-consing into a minimal acyclic DFA
        let mut sig_index: HashMap<(bool, Vec<u32>), u32> = HashMap::new();
        let mut min_id: Vec<u32> = vec![NONE; children.len()];
        let mut min_trans: Vec<Vec<u32>> = Vec::new();
        let mut min_end: Vec<bool> = Vec::new();
        // explicit post-order over the trie (it is a tree)
        let mut stack: Vec<(u32, bool)> = vec![(0, false)];
        while let Some((q, post)) = stack.pop() {
            if post {
                let mapped: Vec<u32> = children[q as usize]
                    .iter()
                    .map(|&c| if c == NONE { NONE } else { min_id[c as usize] })
                    .collect();
                let key = (end[q as usize], mapped.clone());
                let id = *sig_index.entry(key).or_insert_with(|| {
                    let id = min_trans.len() as u32;
                    min_trans.push(mapped);
                    min_end.push(end[q as usize]);
                    id
                });
                min_id[q as usize] = id;
            } else {
                stack.push((q, true));
                for &c in &children[q as usize] {
                    if c != NONE {
                        stack.push((c, false));
                    }
                }
            }
        }
        let root = min_id[0];
        // relabel so the root is state 0
        let n = min_trans.len();
        let mut relabel: Vec<u32> = (0..n as u32).collect();
        relabel.swap(0, root as usize);
        let mut inv = vec![0u32; n];
        for (new, &old) in relabel.iter().enumerate() {
            inv[old as usize] = new as u32;
        }
        let mut trans = vec![NONE; n * n_sym];
        let mut is_end = vec![false; n];
        for old in 0..n {
            let new = inv[old] as usize;
            is_end[new] = min_end[old];
            for a in 0..n_sym {
                let c = min_trans[old][a];
                trans[new * n_sym + a] = if c == NONE { NONE } else { inv[c as usize] };
            }
        }

        // min_depth: BFS from the root (unit edges, so first visit is min)
        let mut min_depth = vec![INF; n];
        min_depth[0] = 0;
        let mut queue = std::collections::VecDeque::from([0u32]);
        while let Some(q) = queue.pop_front() {
            let d = min_depth[q as usize];
            for a in 0..n_sym {
                let c = trans[q as usize * n_sym + a];
                if c != NONE && min_depth[c as usize] == INF {
                    min_depth[c as usize] = d + 1;
                    queue.push_back(c);
                }
            }
        }

        // completion: min distance to an end state (acyclic; iterate to fixpoint)
        let mut completion = vec![INF; n];
        for q in 0..n {
            if is_end[q] {
                completion[q] = 0;
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for q in 0..n {
                let mut best = completion[q];
                for a in 0..n_sym {
                    let c = trans[q * n_sym + a];
                    if c != NONE && completion[c as usize] != INF {
                        best = best.min(completion[c as usize] + 1);
                    }
                }
                if best < completion[q] {
                    completion[q] = best;
                    changed = true;
                }
            }
        }

        Ok(CodedAutomaton {
            n_sym,
            trans,
            is_end,
            min_depth,
            completion,
        })
    }

    #[inline]
    fn child(&self, q: u32, a: u8) -> u32 {
        self.trans[q as usize * self.n_sym + a as usize]
    }
}

/// Structural necessary condition used as an upper oracle when the generator
/// list is a truncation of an infinite family: maximal constant-sign blocks
/// after the first must begin with a symbol labeled +-1, because sign changes
/// only happen at generator starts.
#[derive(Clone, Debug)]
pub struct SignStructure {
    signs: Vec<i8>,
    is_unit: Vec<bool>,
}

impl SignStructure {
    pub fn from_alphabet(alphabet: &Alphabet) -> Result<SignStructure> {
        let labels = alphabet.labels().ok_or_else(|| {
            Error::InvalidSpec("sign structure requires labeled symbols".into())
        })?;
        let signs = labels.iter().map(|&l| if l < 0 { -1 } else { 1 }).collect();
        let is_unit = labels.iter().map(|&l| l.abs() == 1).collect();
        Ok(SignStructure { signs, is_unit })
    }

    /// Walker state is the sign of the previous symbol (0 = none yet).
    pub fn walk_push(&self, prev_sign: i8, sym: u8) -> Option<i8> {
        let s = self.signs[sym as usize];
        if prev_sign != 0 && s != prev_sign && !self.is_unit[sym as usize] {
            return None;
        }
        Some(s)
    }

    pub fn admits(&self, w: &Word) -> bool {
        let mut prev = 0i8;
        for &a in w.indices() {
            match self.walk_push(prev, a) {
                Some(s) => prev = s,
                None => return false,
            }
        }
        true
    }
}

pub struct CodedOracle {
    automaton: CodedAutomaton,
    complete: bool,
    horizon_factor: u32,
    upper: Option<SignStructure>,
    max_gen_len: usize,
    empty: bool,
}

impl CodedOracle {
    pub fn build(
        alphabet: Alphabet,
        generators: &[Word],
        horizon_factor: u32,
        complete: bool,
        upper: Option<SignStructure>,
    ) -> Result<CodedOracle> {
        if horizon_factor == 0 {
            return Err(Error::InvalidSpec("horizon factor must be positive".into()));
        }
        let automaton = CodedAutomaton::build(&alphabet, generators)?;
        let max_gen_len = generators.iter().map(|g| g.len()).max().unwrap_or(0);
        Ok(CodedOracle {
            automaton,
            complete,
            horizon_factor,
            upper,
            max_gen_len,
            empty: generators.is_empty(),
        })
    }

    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn is_empty_shift(&self) -> bool {
        self.empty
    }

    pub fn max_gen_len(&self) -> usize {
        self.max_gen_len
    }

    pub fn automaton(&self) -> &CodedAutomaton {
        &self.automaton
    }

    pub fn upper(&self) -> Option<&SignStructure> {
        self.upper.as_ref()
    }

    pub fn horizon(&self, len: usize) -> usize {
        self.horizon_factor as usize * len
    }

    /// How deep periodization probes may query before going inconclusive.
    pub fn max_query_len(&self, n: usize) -> usize {
        (4 * n).max(2 * self.max_gen_len).max(16)
    }

    /// Initial DP state: every automaton state is a valid read start, with
    /// left padding equal to its minimal trie depth.
    pub(crate) fn walk_init(&self) -> Vec<u32> {
        self.automaton.min_depth.clone()
    }

    /// Advance the min-left-padding DP by one symbol. Transitions follow the
    /// generator trie, plus a jump to the root's children at generator ends.
    pub(crate) fn walk_push(&self, pads: &[u32], sym: u8) -> Option<Vec<u32>> {
        let aut = &self.automaton;
        let n = aut.is_end.len();
        let mut next = vec![INF; n];
        let root_child = aut.child(0, sym);
        let mut any = false;
        for (q, &pad) in pads.iter().enumerate() {
            if pad == INF {
                continue;
            }
            let c = aut.child(q as u32, sym);
            if c != NONE && pad < next[c as usize] {
                next[c as usize] = pad;
                any = true;
            }
            if aut.is_end[q] && root_child != NONE && pad < next[root_child as usize] {
                next[root_child as usize] = pad;
                any = true;
            }
        }
        any.then_some(next)
    }

    /// Total-padding acceptance at the given word length.
    pub(crate) fn accepts(&self, pads: &[u32], len: usize) -> bool {
        if self.complete {
            return pads.iter().any(|&p| p != INF);
        }
        let h = self.horizon(len) as u64;
        pads.iter().zip(self.automaton.completion.iter()).any(|(&p, &c)| {
            p != INF && c != INF && (p as u64 + c as u64) <= h
        })
    }

    pub fn membership(&self, w: &Word) -> Membership {
        if self.empty {
            return Membership::Out;
        }
        if w.is_empty() {
            return Membership::In;
        }
        let mut pads = self.walk_init();
        let mut dead_at = None;
        for i in 0..w.len() {
            match self.walk_push(&pads, w.get(i)) {
                Some(p) => pads = p,
                None => {
                    dead_at = Some(i);
                    break;
                }
            }
        }
        let horizon = self.horizon(w.len());
        if dead_at.is_none() && self.accepts(&pads, w.len()) {
            return Membership::In;
        }
        if self.complete {
            return if dead_at.is_some() {
                Membership::Out
            } else {
                // reachable but beyond the padding budget: with a complete
                // generator list the embedding is still genuine
                Membership::In
            };
        }
        if let Some(upper) = &self.upper {
            if !upper.admits(w) {
                return Membership::Out;
            }
        }
        Membership::Unknown { horizon }
    }
}
