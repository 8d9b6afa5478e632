//! Entropy estimation, the transfer-matrix measure of maximal entropy for
//! SFTs, periodic points and periodic-orbit measures, empirical measures,
//! and the counting-bound audits.
//!
//! Counting measures use exact rational arithmetic; closed-form measures use
//! f64 with stated tolerances.

use crate::alphabet::Word;
use crate::cache::CountCache;
use crate::error::{Error, Result};
use crate::language::{enumerate, visit_words, CountResult};
use crate::shift::{Shift, ShiftKind};
use num_rational::Ratio;
use num_traits::{One, Zero};
use std::collections::HashMap;

pub type Rational = Ratio<i128>;

pub const PERRON_TOLERANCE: f64 = 1e-12;
const PERRON_MAX_ITER: usize = 200_000;

/// Adjacency of the pruned SFT presentation with Perron data.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    pub vertices: Vec<Word>,
    pub matrix: Vec<Vec<u64>>,
    pub lambda: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub residual: f64,
    /// Memory length of the presentation (vertex word length).
    pub order: usize,
}

impl TransferMatrix {
    /// Number of words of length n (paths), for `n >= order`.
    pub fn path_count(&self, n: usize) -> Result<u128> {
        if n < self.order {
            return Err(Error::InvalidSpec(format!(
                "path counts start at the presentation order {}",
                self.order
            )));
        }
        let p = self.power(n - self.order)?;
        let mut total: u128 = 0;
        for row in &p {
            for &x in row {
                total = total
                    .checked_add(x)
                    .ok_or_else(|| Error::Internal("path count overflow".into()))?;
            }
        }
        Ok(total)
    }

    /// Number of n-periodic points: the trace of the n-th power.
    pub fn periodic_count(&self, n: usize) -> Result<u128> {
        if n == 0 {
            return Err(Error::InvalidSpec("period must be positive".into()));
        }
        let p = self.power(n)?;
        let mut total: u128 = 0;
        for (i, row) in p.iter().enumerate() {
            total = total
                .checked_add(row[i])
                .ok_or_else(|| Error::Internal("trace overflow".into()))?;
        }
        Ok(total)
    }

    fn power(&self, e: usize) -> Result<Vec<Vec<u128>>> {
        let n = self.vertices.len();
        let mut result: Vec<Vec<u128>> = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as u128).collect())
            .collect();
        let mut base: Vec<Vec<u128>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|&x| x as u128).collect())
            .collect();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = mat_mul(&result, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = mat_mul(&base, &base)?;
            }
        }
        Ok(result)
    }
}

fn mat_mul(a: &[Vec<u128>], b: &[Vec<u128>]) -> Result<Vec<Vec<u128>>> {
    let n = a.len();
    let mut c = vec![vec![0u128; n]; n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i][k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                let add = x
                    .checked_mul(b[k][j])
                    .ok_or_else(|| Error::Internal("matrix power overflow".into()))?;
                c[i][j] = c[i][j]
                    .checked_add(add)
                    .ok_or_else(|| Error::Internal("matrix power overflow".into()))?;
            }
        }
    }
    Ok(c)
}

/// Power iteration on `M + I` (so periodic irreducible graphs still
/// converge), deterministic all-ones start.
fn perron(matrix: &[Vec<u64>]) -> Result<(f64, Vec<f64>, f64)> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::EmptyShift);
    }
    let mut v = vec![1.0f64; n];
    let mut lambda_shifted = 0.0;
    let mut residual = f64::INFINITY;
    for _ in 0..PERRON_MAX_ITER {
        // w = (M + I) v
        let mut w = vec![0.0f64; n];
        for i in 0..n {
            let mut acc = v[i];
            for j in 0..n {
                if matrix[i][j] != 0 {
                    acc += matrix[i][j] as f64 * v[j];
                }
            }
            w[i] = acc;
        }
        let norm: f64 = w.iter().sum();
        if norm == 0.0 {
            return Err(Error::EmptyShift);
        }
        for x in w.iter_mut() {
            *x /= norm;
        }
        lambda_shifted = norm / v.iter().sum::<f64>();
        residual = w
            .iter()
            .zip(v.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = w;
        if residual < PERRON_TOLERANCE {
            // one more refinement of the eigenvalue estimate
            let mut mv = vec![0.0f64; n];
            for i in 0..n {
                for j in 0..n {
                    mv[i] += matrix[i][j] as f64 * v[j];
                }
            }
            // Rayleigh-style ratio on the largest coordinate
            let (imax, _) = v
                .iter()
                .enumerate()
                .fold((0, 0.0), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
            let lambda = mv[imax] / v[imax];
            return Ok((lambda, v, residual));
        }
    }
    let _ = lambda_shifted;
    Err(Error::NoConvergence {
        iterations: PERRON_MAX_ITER,
        residual,
    })
}

/// Build the transfer matrix with Perron data for an SFT.
pub fn transfer_matrix(shift: &Shift) -> Result<TransferMatrix> {
    let ShiftKind::Sft(oracle) = shift.kind() else {
        return Err(Error::InvalidSpec(
            "transfer matrices exist for SFTs only".into(),
        ));
    };
    if oracle.is_empty_shift() {
        return Err(Error::EmptyShift);
    }
    let matrix = oracle.adjacency();
    let (lambda, right, residual) = perron(&matrix)?;
    // left vector: power iteration on the transpose
    let n = matrix.len();
    let mut transposed = vec![vec![0u64; n]; n];
    for i in 0..n {
        for j in 0..n {
            transposed[j][i] = matrix[i][j];
        }
    }
    let (_, left, _) = perron(&transposed)?;
    Ok(TransferMatrix {
        vertices: oracle.vertices().to_vec(),
        matrix,
        lambda,
        right,
        left,
        residual,
        order: oracle.order(),
    })
}

/// A cylinder-set evaluator `w -> mu([w])`.
#[derive(Clone, Debug)]
pub enum CylinderMeasure {
    /// Stationary Markov measure from Perron data of an SFT presentation.
    Parry {
        order: usize,
        vertices: Vec<Word>,
        index: HashMap<Word, usize>,
        stationary: Vec<f64>,
        /// `transition[i][j]`, zero where there is no edge
        transition: Vec<Vec<f64>>,
    },
    /// Product measure from a probability vector on symbols.
    Bernoulli { probs: Vec<f64> },
    /// Uniform measure on the n-periodic points (exact rationals).
    PeriodicOrbit { period: usize, words: Vec<Word> },
    /// Window statistics of a word set at a fixed depth (exact rationals).
    Empirical {
        depth: usize,
        counts: HashMap<Word, u128>,
        total: u128,
    },
}

/// Exact or floating measure value.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureValue {
    Exact(Rational),
    Float(f64),
}

impl MeasureValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            MeasureValue::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            MeasureValue::Float(x) => *x,
        }
    }
}

impl CylinderMeasure {
    pub fn kind_name(&self) -> &'static str {
        match self {
            CylinderMeasure::Parry { .. } => "parry",
            CylinderMeasure::Bernoulli { .. } => "bernoulli",
            CylinderMeasure::PeriodicOrbit { .. } => "periodic-orbit",
            CylinderMeasure::Empirical { .. } => "empirical",
        }
    }

    /// Evaluate `mu([w])`.
    pub fn eval(&self, w: &Word) -> Result<MeasureValue> {
        match self {
            CylinderMeasure::Parry {
                order,
                vertices,
                index,
                stationary,
                transition,
            } => {
                if w.is_empty() {
                    return Ok(MeasureValue::Float(1.0));
                }
                if w.len() < *order {
                    let mut total = 0.0;
                    for (i, v) in vertices.iter().enumerate() {
                        if v.starts_with(w) {
                            total += stationary[i];
                        }
                    }
                    return Ok(MeasureValue::Float(total));
                }
                let first = w.subword(0, *order);
                let Some(&i0) = index.get(&first) else {
                    return Ok(MeasureValue::Float(0.0));
                };
                let mut p = stationary[i0];
                let mut cur = i0;
                for t in *order..w.len() {
                    let next_word = w.subword(t + 1 - *order, t + 1);
                    let Some(&j) = index.get(&next_word) else {
                        return Ok(MeasureValue::Float(0.0));
                    };
                    p *= transition[cur][j];
                    cur = j;
                }
                Ok(MeasureValue::Float(p))
            }
            CylinderMeasure::Bernoulli { probs } => {
                let mut p = 1.0;
                for &s in w.indices() {
                    p *= probs[s as usize];
                }
                Ok(MeasureValue::Float(p))
            }
            CylinderMeasure::PeriodicOrbit { period, words } => {
                if words.is_empty() {
                    return Err(Error::NoPeriodicPoints { period: *period });
                }
                let mut hits: i128 = 0;
                for p in words {
                    let mut all = true;
                    for i in 0..w.len() {
                        if p.get(i % period) != w.get(i) {
                            all = false;
                            break;
                        }
                    }
                    hits += all as i128;
                }
                Ok(MeasureValue::Exact(Rational::new(hits, words.len() as i128)))
            }
            CylinderMeasure::Empirical { depth, counts, total } => {
                if w.len() > *depth {
                    return Err(Error::InvalidSpec(format!(
                        "empirical measure materialized to depth {depth}"
                    )));
                }
                let mut hits: u128 = 0;
                for (v, c) in counts {
                    if v.starts_with(w) {
                        hits += c;
                    }
                }
                Ok(MeasureValue::Exact(Rational::new(
                    hits as i128,
                    *total as i128,
                )))
            }
        }
    }

    pub fn eval_f64(&self, w: &Word) -> Result<f64> {
        Ok(self.eval(w)?.to_f64())
    }

    /// `sum_{w in L_depth} mu([w])`; exactly 1 for rational kinds, within
    /// 1e-12 for closed-form kinds.
    pub fn verify_normalization(&self, shift: &Shift, depth: usize) -> Result<bool> {
        match self {
            CylinderMeasure::Parry { .. } | CylinderMeasure::Bernoulli { .. } => {
                let mut total = 0.0;
                visit_words(shift, depth, &mut |w| {
                    total += self.eval(w).map(|v| v.to_f64()).unwrap_or(0.0);
                    true
                })?;
                Ok((total - 1.0).abs() <= 1e-12)
            }
            _ => {
                let mut total = Rational::zero();
                let mut fine = true;
                visit_words(shift, depth, &mut |w| {
                    match self.eval(w) {
                        Ok(MeasureValue::Exact(r)) => total += r,
                        _ => fine = false,
                    }
                    true
                })?;
                Ok(fine && total == Rational::one())
            }
        }
    }

    /// Kolmogorov consistency at one depth: `mu([w]) = sum_a mu([wa])` over
    /// alphabet extensions. Exact for rational kinds, 1e-12 for floats.
    pub fn verify_consistency(&self, shift: &Shift, depth: usize) -> Result<bool> {
        let mut ok = true;
        visit_words(shift, depth, &mut |w| {
            let lhs = match self.eval(w) {
                Ok(v) => v,
                Err(_) => {
                    ok = false;
                    return false;
                }
            };
            let mut sum_f = 0.0;
            let mut sum_r = Rational::zero();
            let mut exact = true;
            for a in 0..shift.alphabet().len() as u8 {
                let mut wa = w.clone();
                wa.push(a);
                match self.eval(&wa) {
                    Ok(MeasureValue::Exact(r)) => sum_r += r,
                    Ok(MeasureValue::Float(x)) => {
                        exact = false;
                        sum_f += x;
                    }
                    Err(_) => {
                        ok = false;
                        return false;
                    }
                }
            }
            match (lhs, exact) {
                (MeasureValue::Exact(l), true) => {
                    if l != sum_r {
                        ok = false;
                    }
                }
                (l, _) => {
                    let total = sum_f
                        + (*sum_r.numer() as f64 / *sum_r.denom() as f64);
                    if (l.to_f64() - total).abs() > 1e-12 {
                        ok = false;
                    }
                }
            }
            ok
        })?;
        Ok(ok)
    }

    /// Total-variation distance to another measure over `L_depth`.
    pub fn tv_distance(&self, other: &CylinderMeasure, shift: &Shift, depth: usize) -> Result<f64> {
        let mut total = 0.0;
        let mut err = None;
        visit_words(shift, depth, &mut |w| {
            match (self.eval_f64(w), other.eval_f64(w)) {
                (Ok(a), Ok(b)) => total += (a - b).abs(),
                (Err(e), _) | (_, Err(e)) => {
                    err = Some(e);
                    return false;
                }
            }
            true
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(total / 2.0),
        }
    }

    /// Total-variation distance between the measure and its shift at one
    /// depth: `(1/2) sum |mu([u]) - sum_a mu([au])|`.
    pub fn invariance_defect(&self, shift: &Shift, depth: usize) -> Result<f64> {
        let mut total = 0.0;
        let mut err = None;
        visit_words(shift, depth, &mut |u| {
            let lhs = match self.eval_f64(u) {
                Ok(x) => x,
                Err(e) => {
                    err = Some(e);
                    return false;
                }
            };
            let mut shifted = 0.0;
            for a in 0..shift.alphabet().len() as u8 {
                let mut au = Word::from_indices(vec![a]);
                for i in 0..u.len() {
                    au.push(u.get(i));
                }
                match self.eval_f64(&au) {
                    Ok(x) => shifted += x,
                    Err(e) => {
                        err = Some(e);
                        return false;
                    }
                }
            }
            total += (lhs - shifted).abs();
            true
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(total / 2.0),
        }
    }
}

/// The Parry measure and markov entropy of an irreducible SFT.
pub struct SftMme {
    pub transfer: TransferMatrix,
    pub measure: CylinderMeasure,
    /// Closed-form entropy of the stationary Markov chain; equals
    /// `ln(lambda)` within 1e-9 for the Parry weights.
    pub markov_entropy: f64,
}

pub fn sft_mme(shift: &Shift) -> Result<SftMme> {
    let ShiftKind::Sft(oracle) = shift.kind() else {
        return Err(Error::InvalidSpec("Parry data exists for SFTs only".into()));
    };
    if oracle.is_empty_shift() {
        return Err(Error::EmptyShift);
    }
    if !oracle.is_irreducible() {
        return Err(Error::ReducibleSft {
            components: oracle.component_symbol_lists(),
        });
    }
    let transfer = transfer_matrix(shift)?;
    let n = transfer.vertices.len();
    let lambda = transfer.lambda;
    // stationary pi_i = l_i r_i / <l, r>; transitions p_ij = M_ij r_j / (lambda r_i)
    let dot: f64 = transfer
        .left
        .iter()
        .zip(transfer.right.iter())
        .map(|(a, b)| a * b)
        .sum();
    let stationary: Vec<f64> = (0..n)
        .map(|i| transfer.left[i] * transfer.right[i] / dot)
        .collect();
    let mut transition = vec![vec![0.0f64; n]; n];
    for (i, row) in transition.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if transfer.matrix[i][j] != 0 {
                *cell =
                    transfer.matrix[i][j] as f64 * transfer.right[j] / (lambda * transfer.right[i]);
            }
        }
    }
    let mut markov_entropy = 0.0;
    for (pi, row) in stationary.iter().zip(transition.iter()) {
        for &p in row {
            if p > 0.0 {
                markov_entropy -= pi * p * p.ln();
            }
        }
    }
    let mut index = HashMap::new();
    for (i, v) in transfer.vertices.iter().enumerate() {
        index.insert(v.clone(), i);
    }
    let measure = CylinderMeasure::Parry {
        order: transfer.order,
        vertices: transfer.vertices.clone(),
        index,
        stationary,
        transition,
    };
    Ok(SftMme {
        transfer,
        measure,
        markov_entropy,
    })
}

/// Words of length n whose periodization lies in the shift.
pub struct PeriodicPoints {
    pub period: usize,
    pub words: Vec<Word>,
    /// False when the family decides periodization only up to a horizon.
    pub exact: bool,
}

pub fn periodic_points(shift: &Shift, n: usize) -> Result<PeriodicPoints> {
    let slice = enumerate(shift, n)?;
    let mut words = Vec::new();
    let mut exact = shift.is_exact();
    for w in slice.words() {
        let (p, e) = shift.periodize(w)?;
        exact &= e;
        if p {
            words.push(w.clone());
        }
    }
    Ok(PeriodicPoints {
        period: n,
        words,
        exact,
    })
}

pub fn periodic_orbit_measure(shift: &Shift, n: usize) -> Result<CylinderMeasure> {
    let pts = periodic_points(shift, n)?;
    if pts.words.is_empty() {
        return Err(Error::NoPeriodicPoints { period: n });
    }
    Ok(CylinderMeasure::PeriodicOrbit {
        period: n,
        words: pts.words,
    })
}

/// Empirical window statistics of a word set: `mu([u])` for `|u| <= depth`
/// is the frequency of `u` as a prefix of depth-length windows across all
/// members.
pub fn empirical_measure(words: &[Word], depth: usize) -> Result<CylinderMeasure> {
    if words.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let n = words[0].len();
    if words.iter().any(|w| w.len() != n) {
        return Err(Error::InvalidSpec("words must share one length".into()));
    }
    if depth == 0 || depth > n.saturating_sub(depth) {
        return Err(Error::InvalidSpec(format!(
            "window depth {depth} must satisfy 1 <= depth <= n - depth (n = {n})"
        )));
    }
    let mut counts: HashMap<Word, u128> = HashMap::new();
    let mut total: u128 = 0;
    for w in words {
        for i in 0..=(n - depth) {
            *counts.entry(w.subword(i, i + depth)).or_insert(0) += 1;
            total += 1;
        }
    }
    Ok(CylinderMeasure::Empirical {
        depth,
        counts,
        total,
    })
}

/// Per-n entropy estimates with the running infimum and subadditivity audit.
#[derive(Clone, Debug, serde::Serialize)]
pub struct EntropyRow {
    pub n: usize,
    pub count: u128,
    pub possible: u128,
    pub estimate: f64,
    pub inf_so_far: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct EntropyReport {
    pub rows: Vec<EntropyRow>,
    /// Family-exact value when available (SFT: ln lambda).
    pub exact: Option<f64>,
    pub approximate: bool,
    /// `|L_{a+b}| <= |L_a| |L_b|` for all materialized splits.
    pub subadditive_ok: bool,
}

pub fn entropy_report(
    shift: &Shift,
    n_max: usize,
    cache: Option<&CountCache>,
) -> Result<EntropyReport> {
    if shift.is_empty_shift() {
        return Err(Error::EmptyShift);
    }
    let mut counts: Vec<CountResult> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let c = match cache {
            Some(cache) => cache.count(shift, n)?,
            None => crate::language::count_words(shift, n)?,
        };
        counts.push(c);
    }
    let mut rows = Vec::with_capacity(n_max);
    let mut inf = f64::INFINITY;
    let mut approximate = false;
    for (i, c) in counts.iter().enumerate() {
        let n = i + 1;
        approximate |= c.approximate;
        let estimate = if c.certain == 0 {
            f64::NEG_INFINITY
        } else {
            (c.certain as f64).ln() / n as f64
        };
        inf = inf.min(estimate);
        rows.push(EntropyRow {
            n,
            count: c.certain,
            possible: c.possible,
            estimate,
            inf_so_far: inf,
        });
    }
    let mut subadditive_ok = true;
    for a in 1..=n_max {
        for b in a..=n_max {
            if a + b > n_max {
                break;
            }
            let ca = counts[a - 1].certain;
            let cb = counts[b - 1].certain;
            let cab = counts[a + b - 1].certain;
            if ca.checked_mul(cb).map(|p| cab > p).unwrap_or(false) {
                subadditive_ok = false;
            }
        }
    }
    let exact = match shift.kind() {
        ShiftKind::Sft(_) => Some(transfer_matrix(shift)?.lambda.ln()),
        ShiftKind::Full => Some((shift.alphabet().len() as f64).ln()),
        _ => None,
    };
    Ok(EntropyReport {
        rows,
        exact,
        approximate,
        subadditive_ok,
    })
}

/// One row of the almost-specification upper-bound audit.
#[derive(Clone, Debug, serde::Serialize)]
pub struct AuditRow {
    pub n: usize,
    pub count: u128,
    pub estimate: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct SuffixAudit {
    pub word: String,
    /// `(n, |L_n ∩ L w|)` for n in the sweep.
    pub rows: Vec<(usize, u128)>,
    /// Largest epsilon with `count > eps n^{-1/2} e^{n h}` across the sweep.
    pub epsilon: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct GibbsAudit {
    /// Smallest Q with `mu([w]) <= Q e^{-|w| h}` per depth.
    pub q_per_depth: Vec<(usize, f64)>,
    pub q1: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct BoundAudit {
    pub mistake_budget: usize,
    pub entropy: f64,
    pub entropy_exact: bool,
    pub rows: Vec<AuditRow>,
    pub violations: usize,
    pub suffix: Option<SuffixAudit>,
    pub gibbs: Option<GibbsAudit>,
}

/// Audit the polynomial upper bound `|L_n| <= |A|^{2m} n^{2m} e^{nh}`, the
/// suffix-count lower bound for a chosen word, and the upper Gibbs constant
/// of a measure.
///
/// A violation with exact entropy is a hard failure: it signals an oracle
/// bug or a false premise (the shift lacks almost specification with that
/// budget).
#[allow(clippy::too_many_arguments)]
pub fn bound_audit(
    shift: &Shift,
    m: usize,
    entropy: f64,
    entropy_exact: bool,
    n_max: usize,
    suffix_word: Option<&Word>,
    measure: Option<&CylinderMeasure>,
    cache: Option<&CountCache>,
) -> Result<BoundAudit> {
    let a = shift.alphabet().len() as f64;
    let mut rows = Vec::with_capacity(n_max);
    let mut violations = 0;
    for n in 1..=n_max {
        let c = match cache {
            Some(cache) => cache.count(shift, n)?,
            None => crate::language::count_words(shift, n)?,
        };
        let bound = a.powi(2 * m as i32)
            * (n as f64).powi(2 * m as i32)
            * (n as f64 * entropy).exp();
        let estimate = if c.certain == 0 {
            f64::NEG_INFINITY
        } else {
            (c.certain as f64).ln() / n as f64
        };
        // relative slack for the equality case (e^{n ln|A|} vs |A|^n rounding)
        let pass = (c.certain as f64) <= bound * (1.0 + 1e-9);
        violations += !pass as usize;
        rows.push(AuditRow {
            n,
            count: c.certain,
            estimate,
            bound,
            pass,
        });
    }
    if violations > 0 && entropy_exact {
        return Err(Error::Internal(format!(
            "counting bound violated {violations} times with exact entropy"
        )));
    }
    let suffix = match suffix_word {
        None => None,
        Some(w) => {
            if !shift.is_in(w) {
                return Err(Error::WordNotInLanguage(shift.alphabet().render(w)));
            }
            let mut srows = Vec::new();
            let mut eps = f64::INFINITY;
            for n in w.len()..=n_max {
                let count = count_with_suffix(shift, n, w)?;
                let scale = (count as f64) * (n as f64).sqrt() * (-(n as f64) * entropy).exp();
                eps = eps.min(scale);
                srows.push((n, count));
            }
            Some(SuffixAudit {
                word: shift.alphabet().render(w),
                rows: srows,
                epsilon: if eps.is_finite() { eps } else { 0.0 },
            })
        }
    };
    let gibbs = match measure {
        None => None,
        Some(mu) => {
            let depth_max = n_max.min(20);
            let mut q_per_depth = Vec::new();
            let mut q1: f64 = 0.0;
            for depth in 1..=depth_max {
                let mut q: f64 = 0.0;
                let mut err = None;
                visit_words(shift, depth, &mut |w| match mu.eval_f64(w) {
                    Ok(x) => {
                        q = q.max(x * (depth as f64 * entropy).exp());
                        true
                    }
                    Err(e) => {
                        err = Some(e);
                        false
                    }
                })?;
                if let Some(e) = err {
                    return Err(e);
                }
                q1 = q1.max(q);
                q_per_depth.push((depth, q));
            }
            Some(GibbsAudit { q_per_depth, q1 })
        }
    };
    Ok(BoundAudit {
        mistake_budget: m,
        entropy,
        entropy_exact,
        rows,
        violations,
        suffix,
        gibbs,
    })
}

/// `|L_n ∩ L w|`: words of length n ending with `w`.
pub fn count_with_suffix(shift: &Shift, n: usize, w: &Word) -> Result<u128> {
    if n < w.len() {
        return Ok(0);
    }
    if n == w.len() {
        return Ok(shift.is_in(w) as u128);
    }
    let mut count = 0u128;
    visit_words(shift, n - w.len(), &mut |x| {
        if shift.is_in(&x.concat(w)) {
            count += 1;
        }
        true
    })?;
    Ok(count)
}
