//! Subshifts of finite type: forbidden-word compilation to a higher-block
//! transition graph, bi-infinite pruning, and the resulting exact oracle.
//!
//! The oracle answers for the extendable language: vertices not lying on
//! bi-infinite paths are deleted, so locally admissible words that cannot be
//! completed to points are `Out`.

use crate::alphabet::{Alphabet, Word};
use crate::error::{Error, Result};
use smallvec::SmallVec;
use std::collections::{HashMap, HashSet};

const MAX_VERTICES: usize = 1 << 22;

pub struct SftOracle {
    alphabet: Alphabet,
    /// Max forbidden word length.
    window: usize,
    /// Memory length: vertices are words of this length.
    order: usize,
    vertices: Vec<Word>,
    vert_index: HashMap<Word, u32>,
    /// `edges[v * |A| + a]` = target vertex, or u32::MAX.
    edges: Vec<u32>,
    /// Admissible words shorter than `order` (subwords of surviving vertices).
    short_ok: HashSet<Word>,
    empty: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum SftWalk {
    Partial(SmallVec<[u8; 8]>),
    Vertex(u32),
}

impl SftOracle {
    pub fn build(alphabet: Alphabet, forbidden: Vec<Word>) -> Result<SftOracle> {
        for f in &forbidden {
            if f.is_empty() {
                return Err(Error::InvalidSpec("forbidden words must be nonempty".into()));
            }
            alphabet.validate_word(f)?;
        }
        let window = forbidden.iter().map(|f| f.len()).max().unwrap_or(1);
        let order = window.saturating_sub(1).max(1);

        let n_sym = alphabet.len();
        if (n_sym as f64).powi(order as i32) > MAX_VERTICES as f64 {
            return Err(Error::InvalidSpec(format!(
                "forbidden words too long: {}^{} vertices exceeds limit",
                n_sym, order
            )));
        }

        // locally admissible order-words
        let mut vertices: Vec<Word> = Vec::new();
        let mut buf = Word::empty();
        gen_admissible(&alphabet, &forbidden, order, &mut buf, &mut vertices);

        let mut alive: Vec<bool> = vec![true; vertices.len()];
        let mut vert_index: HashMap<Word, u32> = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            vert_index.insert(v.clone(), i as u32);
        }

        // edge test: u -> (u[1..] + a) admissible if every forbidden word
        // fails to match the suffix of u+a
        let edge_target = |u: &Word, a: u8, vert_index: &HashMap<Word, u32>| -> Option<u32> {
            let mut ext = u.clone();
            ext.push(a);
            for f in &forbidden {
                if f.len() <= ext.len() && ext.ends_with(f) {
                    return None;
                }
            }
            let tgt = ext.subword(1, ext.len());
            vert_index.get(&tgt).copied()
        };

        // iteratively prune vertices without successors or predecessors
        loop {
            let mut out_deg = vec![0usize; vertices.len()];
            let mut in_deg = vec![0usize; vertices.len()];
            for (i, u) in vertices.iter().enumerate() {
                if !alive[i] {
                    continue;
                }
                for a in 0..n_sym as u8 {
                    if let Some(t) = edge_target(u, a, &vert_index) {
                        if alive[t as usize] {
                            out_deg[i] += 1;
                            in_deg[t as usize] += 1;
                        }
                    }
                }
            }
            let mut changed = false;
            for i in 0..vertices.len() {
                if alive[i] && (out_deg[i] == 0 || in_deg[i] == 0) {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let surviving: Vec<Word> = vertices
            .iter()
            .zip(alive.iter())
            .filter(|(_, &a)| a)
            .map(|(v, _)| v.clone())
            .collect();
        let empty = surviving.is_empty();
        let mut index = HashMap::new();
        for (i, v) in surviving.iter().enumerate() {
            index.insert(v.clone(), i as u32);
        }
        let mut edges = vec![u32::MAX; surviving.len() * n_sym];
        for (i, u) in surviving.iter().enumerate() {
            for a in 0..n_sym as u8 {
                if let Some(t) = edge_target(u, a, &index) {
                    edges[i * n_sym + a as usize] = t;
                }
            }
        }

        let mut short_ok = HashSet::new();
        short_ok.insert(Word::empty());
        for v in &surviving {
            for len in 1..order {
                for start in 0..=(order - len) {
                    short_ok.insert(v.subword(start, start + len));
                }
            }
        }

        Ok(SftOracle {
            alphabet,
            window,
            order,
            vertices: surviving,
            vert_index: index,
            edges,
            short_ok,
            empty,
        })
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_empty_shift(&self) -> bool {
        self.empty
    }

    /// Surviving vertices in canonical order of their words.
    pub fn vertices(&self) -> &[Word] {
        &self.vertices
    }

    /// Adjacency as a dense 0/1 matrix in vertex order.
    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let n = self.vertices.len();
        let n_sym = self.alphabet.len();
        let mut m = vec![vec![0u64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for a in 0..n_sym {
                let t = self.edges[i * n_sym + a];
                if t != u32::MAX {
                    row[t as usize] += 1;
                }
            }
        }
        m
    }

    pub fn edge(&self, v: u32, sym: u8) -> Option<u32> {
        let t = self.edges[v as usize * self.alphabet.len() + sym as usize];
        (t != u32::MAX).then_some(t)
    }

    pub(crate) fn walk_init(&self) -> SftWalk {
        SftWalk::Partial(SmallVec::new())
    }

    pub(crate) fn walk_push(&self, walk: &SftWalk, sym: u8) -> Option<SftWalk> {
        match walk {
            SftWalk::Partial(p) => {
                let mut next = p.clone();
                next.push(sym);
                if next.len() == self.order {
                    let w = Word::from_indices(next.to_vec());
                    self.vert_index.get(&w).map(|&v| SftWalk::Vertex(v))
                } else {
                    let w = Word::from_indices(next.to_vec());
                    self.short_ok.contains(&w).then_some(SftWalk::Partial(next))
                }
            }
            SftWalk::Vertex(v) => self.edge(*v, sym).map(SftWalk::Vertex),
        }
    }

    /// Strongly connected components of the pruned graph, as vertex index
    /// lists (Kosaraju).
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.vertices.len();
        let n_sym = self.alphabet.len();
        let succ = |i: usize| -> Vec<usize> {
            (0..n_sym)
                .filter_map(|a| {
                    let t = self.edges[i * n_sym + a];
                    (t != u32::MAX).then_some(t as usize)
                })
                .collect()
        };
        // forward finish order
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            // iterative DFS with explicit post-visit
            let mut stack = vec![(s, false)];
            while let Some((v, post)) = stack.pop() {
                if post {
                    order.push(v);
                    continue;
                }
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                stack.push((v, true));
                for t in succ(v) {
                    if !seen[t] {
                        stack.push((t, false));
                    }
                }
            }
        }
        // reverse graph
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            for t in succ(i) {
                pred[t].push(i);
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut comps: Vec<Vec<u32>> = Vec::new();
        for &s in order.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = Vec::new();
            let mut stack = vec![s];
            comp[s] = id;
            while let Some(v) = stack.pop() {
                members.push(v as u32);
                for &p in &pred[v] {
                    if comp[p] == usize::MAX {
                        comp[p] = id;
                        stack.push(p);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps
    }

    /// True when the pruned graph is a single strongly connected component.
    pub fn is_irreducible(&self) -> bool {
        !self.empty && self.components().len() == 1
    }

    pub fn component_symbol_lists(&self) -> Vec<Vec<String>> {
        self.components()
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&v| self.alphabet.render(&self.vertices[v as usize]))
                    .collect()
            })
            .collect()
    }
}

fn gen_admissible(
    alphabet: &Alphabet,
    forbidden: &[Word],
    len: usize,
    buf: &mut Word,
    out: &mut Vec<Word>,
) {
    if buf.len() == len {
        out.push(buf.clone());
        return;
    }
    'next: for a in 0..alphabet.len() as u8 {
        buf.push(a);
        for f in forbidden {
            if f.len() <= buf.len() && buf.ends_with(f) {
                buf.pop();
                continue 'next;
            }
        }
        gen_admissible(alphabet, forbidden, len, buf, out);
        buf.pop();
    }
}
