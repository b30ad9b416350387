//! Model families over a fixed design of size `n`: histogram and
//! piecewise-polynomial spaces on interval partitions of `{1..n}`, and
//! trigonometric spaces on the regular design `x_i = i/n`.
//!
//! A collection couples each model with a weight `Delta_m` entering both the
//! penalty and the series `Sigma = sum_m exp(-Delta_m)` of the oracle bound.
//! Default weights: block count for partition families, `1 + log(index + 1)`
//! along the nested trigonometric ladder, and `|m| + log C(ground, |m|)` for
//! subset ladders.
//!
//! Collection-level metrics: `Lambda_2` of the envelope (the sum of all
//! models) and `LambdaBar_inf = max over model pairs of
//! Lambda_inf(S_m + S_m') floored at 1`. Every built family is closed under
//! the pair sum (`S_m + S_m'` is again a member), so the pair supremum equals
//! the supremum over single members and no quadratic sweep is needed.

use crate::linalg::{self, RealVector, Subspace};
use crate::math;
use crate::stats;
use serde::Serialize;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    InvalidPartition(Vec<String>),
    BlockTooSmall { block: (usize, usize), needed: usize },
    FrequencyOutOfRange { index: usize, n: usize },
    AmbientMismatch { expected: usize, got: usize },
    TooManyBlocks { count: usize, limit: usize },
    Linalg(linalg::LinalgError),
    Invalid(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidPartition(problems) => {
                write!(f, "invalid partition: ")?;
                for (i, p) in problems.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            ModelError::BlockTooSmall { block, needed } => write!(
                f,
                "block {}-{} has fewer than {} design points",
                block.0, block.1, needed
            ),
            ModelError::FrequencyOutOfRange { index, n } => write!(
                f,
                "frequency index {index} is not resolvable on a design of size {n}"
            ),
            ModelError::AmbientMismatch { expected, got } => {
                write!(f, "ambient size mismatch: expected {expected}, got {got}")
            }
            ModelError::TooManyBlocks { count, limit } => {
                write!(f, "finest partition has {count} blocks, limit {limit}")
            }
            ModelError::Linalg(e) => write!(f, "{e}"),
            ModelError::Invalid(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<linalg::LinalgError> for ModelError {
    fn from(e: linalg::LinalgError) -> Self {
        ModelError::Linalg(e)
    }
}

/// Full exhaustive enumeration of block merges is used up to this many finest
/// blocks; larger finest partitions fall back to the dyadic ladder.
pub const ENUMERATION_LIMIT: usize = 12;

/// Partition of `{1..n}` into consecutive blocks, 1-based inclusive bounds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IntervalPartition {
    n: usize,
    blocks: Vec<(usize, usize)>,
}

impl IntervalPartition {
    /// Validates that the blocks tile `{1..n}` in order; every defect (bad
    /// bounds, gaps, overlaps, wrong endpoints) is reported, not just the
    /// first.
    pub fn new(n: usize, blocks: Vec<(usize, usize)>) -> Result<Self, ModelError> {
        let mut problems = Vec::new();
        if n == 0 {
            problems.push("design size must be positive".to_string());
        }
        if blocks.is_empty() {
            problems.push("at least one block is required".to_string());
        }
        for &(lo, hi) in &blocks {
            if lo == 0 {
                problems.push(format!("block {lo}-{hi}: indices are 1-based"));
            }
            if lo > hi {
                problems.push(format!("block {lo}-{hi}: lower bound exceeds upper bound"));
            }
        }
        if let Some(&(first, _)) = blocks.first() {
            if first > 1 {
                problems.push(format!("gap before first block: positions 1-{}", first - 1));
            }
        }
        for w in blocks.windows(2) {
            let (_, hi) = w[0];
            let (lo, _) = w[1];
            if lo > hi + 1 {
                problems.push(format!("gap between {} and {}", hi, lo));
            } else if lo <= hi {
                problems.push(format!("overlap between {} and {}", lo, hi));
            }
        }
        if let Some(&(_, last)) = blocks.last() {
            if last < n {
                problems.push(format!("gap after last block: positions {}-{}", last + 1, n));
            } else if last > n {
                problems.push(format!("last block ends at {} beyond design size {}", last, n));
            }
        }
        if problems.is_empty() {
            Ok(IntervalPartition { n, blocks })
        } else {
            Err(ModelError::InvalidPartition(problems))
        }
    }

    /// `k` blocks of near-equal length; when `k` does not divide `n` the first
    /// `n mod k` blocks carry one extra point.
    pub fn equal_blocks(n: usize, k: usize) -> Result<Self, ModelError> {
        if k == 0 || k > n {
            return Err(ModelError::Invalid(format!(
                "cannot split {n} positions into {k} blocks"
            )));
        }
        let base = n / k;
        let extra = n % k;
        let mut blocks = Vec::with_capacity(k);
        let mut lo = 1;
        for i in 0..k {
            let len = base + usize::from(i < extra);
            blocks.push((lo, lo + len - 1));
            lo += len;
        }
        Ok(IntervalPartition { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn min_block_len(&self) -> usize {
        self.blocks.iter().map(|&(lo, hi)| hi - lo + 1).min().unwrap_or(0)
    }

    /// Interior cut positions: the upper bound of each block except the last.
    fn cuts(&self) -> Vec<usize> {
        self.blocks[..self.blocks.len() - 1]
            .iter()
            .map(|&(_, hi)| hi)
            .collect()
    }

    fn from_cuts(n: usize, cuts: &[usize]) -> Self {
        let mut blocks = Vec::with_capacity(cuts.len() + 1);
        let mut lo = 1;
        for &c in cuts {
            blocks.push((lo, c));
            lo = c + 1;
        }
        blocks.push((lo, n));
        IntervalPartition { n, blocks }
    }

    /// Common refinement: the coarsest partition refining both operands. For
    /// histogram-type spaces `S_m + S_m'` is exactly the space on the
    /// refinement.
    pub fn join(&self, other: &IntervalPartition) -> Result<IntervalPartition, ModelError> {
        if self.n != other.n {
            return Err(ModelError::AmbientMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut cuts: Vec<usize> = self.cuts();
        for c in other.cuts() {
            if !cuts.contains(&c) {
                cuts.push(c);
            }
        }
        cuts.sort_unstable();
        Ok(Self::from_cuts(self.n, &cuts))
    }

    /// True when every block of `self` is a union of blocks of `finer`.
    pub fn is_refined_by(&self, finer: &IntervalPartition) -> bool {
        if self.n != finer.n {
            return false;
        }
        let fine_cuts = finer.cuts();
        self.cuts().iter().all(|c| fine_cuts.contains(c))
    }

    pub fn label(&self) -> String {
        let mut s = String::new();
        for (i, &(lo, hi)) in self.blocks.iter().enumerate() {
            if i > 0 {
                s.push('|');
            }
            s.push_str(&format!("{lo}-{hi}"));
        }
        s
    }
}

/// Indicator basis: one normalized block indicator per block. Exactly
/// orthonormal by construction.
pub fn histogram_basis(p: &IntervalPartition) -> Vec<RealVector> {
    let n = p.n();
    p.blocks()
        .iter()
        .map(|&(lo, hi)| {
            let len = (hi - lo + 1) as f64;
            let v = 1.0 / math::sqrt(len);
            let mut data = vec![0.0; n];
            for d in data.iter_mut().take(hi).skip(lo - 1) {
                *d = v;
            }
            RealVector::new(data).expect("indicator entries are finite")
        })
        .collect()
}

/// One vector of the per-block discrete Chebyshev system: local entries
/// `sqrt(2/L) cos(j (l + 1/2) pi / L)` for `j >= 1` and `1/sqrt(L)` for
/// `j = 0` on the block `lo..=hi` (1-based, length `L`), zero elsewhere.
fn dct_column(n: usize, lo: usize, hi: usize, j: usize) -> RealVector {
    let lf = (hi - lo + 1) as f64;
    let mut data = vec![0.0; n];
    if j == 0 {
        let v = 1.0 / math::sqrt(lf);
        for e in data.iter_mut().take(hi).skip(lo - 1) {
            *e = v;
        }
    } else {
        let scale = math::sqrt(2.0 / lf);
        for (l, e) in data.iter_mut().take(hi).skip(lo - 1).enumerate() {
            let theta = (j as f64) * (l as f64 + 0.5) * core::f64::consts::PI / lf;
            *e = scale * math::cos(theta);
        }
    }
    RealVector::new(data).expect("cosine entries are finite")
}

/// Per-block discrete Chebyshev system up to degree `d`. This is the
/// orthonormal DCT-II system, so the basis is exactly orthonormal; each block
/// must hold at least `d + 1` design points.
pub fn piecewise_poly_basis(p: &IntervalPartition, d: usize) -> Result<Vec<RealVector>, ModelError> {
    let n = p.n();
    let mut out = Vec::with_capacity(p.num_blocks() * (d + 1));
    for &(lo, hi) in p.blocks() {
        let len = hi - lo + 1;
        if len < d + 1 {
            return Err(ModelError::BlockTooSmall {
                block: (lo, hi),
                needed: d + 1,
            });
        }
        for j in 0..=d {
            out.push(dct_column(n, lo, hi, j));
        }
    }
    Ok(out)
}

/// Trigonometric vectors on the design `x_i = i/n`, indexed as: 0 is the
/// constant, `2l - 1` is `sqrt(2/n) cos(2 pi l x_i)`, `2l` is
/// `sqrt(2/n) sin(2 pi l x_i)`. Orthonormality requires every frequency `l`
/// to satisfy `2l + 1 <= n`.
pub fn trig_basis(n: usize, indices: &[usize]) -> Result<Vec<RealVector>, ModelError> {
    let mut out = Vec::with_capacity(indices.len());
    for &idx in indices {
        let l = idx.div_ceil(2);
        if idx > 0 && 2 * l + 1 > n {
            return Err(ModelError::FrequencyOutOfRange { index: idx, n });
        }
        let mut data = vec![0.0; n];
        if idx == 0 {
            let v = 1.0 / math::sqrt(n as f64);
            data.iter_mut().for_each(|e| *e = v);
        } else {
            let scale = math::sqrt(2.0 / n as f64);
            let omega = 2.0 * core::f64::consts::PI * l as f64 / n as f64;
            for (i, e) in data.iter_mut().enumerate() {
                let arg = omega * (i as f64 + 1.0);
                *e = scale * if idx % 2 == 1 { math::cos(arg) } else { math::sin(arg) };
            }
        }
        out.push(RealVector::new(data).expect("trig entries are finite"));
    }
    Ok(out)
}

/// Structural identity of a model inside a collection.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelDescriptor {
    Blocks(IntervalPartition),
    Freqs(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelEntry {
    pub label: String,
    pub descriptor: ModelDescriptor,
    pub space: Subspace,
    /// Weight `Delta_m` in the penalty and in `Sigma = sum exp(-Delta_m)`.
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Histogram,
    PiecewisePoly { degree: usize },
    Trigonometric { dbar: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigMode {
    Nested,
    AllSubsets,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelCollection {
    pub n: usize,
    pub family: FamilyKind,
    pub items: Vec<ModelEntry>,
    /// Sum of all model spaces; every `S_m` is contained in it.
    pub envelope: Subspace,
    /// Whether `S_m + S_m'` is again a member space for every pair. Histogram
    /// and trigonometric builders produce closed families; the block
    /// Chebyshev systems of the piecewise route leave the merged-partition
    /// span, so those collections (like ad-hoc ones) are not closed and pay
    /// the quadratic pair sweep in [`Self::lambdas`].
    pub join_closed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollectionLambdas {
    /// `Lambda_2` of the envelope space.
    pub lambda2: f64,
    /// `max(1, sup over pairs of Lambda_inf(S_m + S_m'))`.
    pub lambda_bar_inf: f64,
}

impl ModelCollection {
    /// `Sigma = sum_m exp(-Delta_m)`.
    pub fn sigma_weights(&self) -> f64 {
        self.items.iter().map(|e| math::exp(-e.delta)).sum()
    }

    pub fn max_dim(&self) -> usize {
        self.items.iter().map(|e| e.space.dim()).max().unwrap_or(0)
    }

    pub fn entry(&self, label: &str) -> Option<&ModelEntry> {
        self.items.iter().find(|e| e.label == label)
    }

    /// Collection-level seminorms driving the penalty: `Lambda_2` of the
    /// envelope and the pair supremum of `Lambda_inf` floored at 1. For
    /// join-closed families the pair supremum collapses to a sweep over
    /// single members since `S_m + S_m'` is again a member.
    pub fn lambdas(&self) -> Result<CollectionLambdas, ModelError> {
        let lambda2 = self.envelope.lambda2();
        let mut worst: f64 = 0.0;
        if self.join_closed {
            for e in &self.items {
                worst = worst.max(entry_lambda_inf(e));
            }
        } else {
            for (i, a) in self.items.iter().enumerate() {
                for b in &self.items[i..] {
                    let s = linalg::sum_subspace(&a.space, &b.space)?;
                    worst = worst.max(s.lambda_inf());
                }
            }
        }
        Ok(CollectionLambdas {
            lambda2,
            lambda_bar_inf: worst.max(1.0),
        })
    }

    /// Family fit conditions behind the closed-form penalty routes, with the
    /// constants `a` (block-size calibration) and `exp_b` (the exponent `b`
    /// of the remainder decay). Violations are reported as warnings, never
    /// errors: the procedure still runs, only the closed-form guarantees may
    /// not apply.
    pub fn condition_warnings(&self, a: f64, _exp_b: f64) -> Vec<String> {
        let mut warnings = Vec::new();
        let n = self.n as f64;
        let log_n = math::ln(n);
        match self.family {
            FamilyKind::Histogram => {
                let needed = a * a * log_n * log_n;
                let min_len = self.min_block_len();
                if (min_len as f64) < needed {
                    warnings.push(format!(
                        "histogram fit condition fails: min block {min_len} < a^2 log^2 n = {needed:.3}"
                    ));
                }
            }
            FamilyKind::PiecewisePoly { degree } => {
                let needed = (degree as f64 + 1.0) * a * a * log_n * log_n;
                let min_len = self.min_block_len();
                if (min_len as f64) < needed {
                    warnings.push(format!(
                        "piecewise-poly fit condition fails: min block {min_len} < (d+1) a^2 log^2 n = {needed:.3}"
                    ));
                }
            }
            FamilyKind::Trigonometric { dbar } => {
                let span = 2.0 * dbar as f64 + 1.0;
                let cap = math::sqrt(n) / (a * log_n);
                if span > cap {
                    warnings.push(format!(
                        "trigonometric fit condition fails: 2*Dbar+1 = {span} > sqrt(n)/(a log n) = {cap:.3}"
                    ));
                }
            }
        }
        warnings
    }

    fn min_block_len(&self) -> usize {
        self.items
            .iter()
            .filter_map(|e| match &e.descriptor {
                ModelDescriptor::Blocks(p) => Some(p.min_block_len()),
                ModelDescriptor::Freqs(_) => None,
            })
            .min()
            .unwrap_or(0)
    }
}

/// `Lambda_inf` of one entry, using the block-diagonal structure of the
/// projector for partition models (exact and far cheaper than the dense
/// sweep).
fn entry_lambda_inf(e: &ModelEntry) -> f64 {
    match &e.descriptor {
        ModelDescriptor::Blocks(p) => {
            let degree = e.space.dim() / p.num_blocks();
            debug_assert_eq!(degree * p.num_blocks(), e.space.dim());
            if degree == 0 {
                return 0.0; // empty model
            }
            lambda_inf_blockwise(p, degree - 1)
        }
        ModelDescriptor::Freqs(_) => e.space.lambda_inf(),
    }
}

/// `Lambda_inf` of the piecewise space of degree `d` on partition `p`: the
/// projector is block diagonal, so the row-sum maximum is taken per block
/// over the local DCT kernel.
pub fn lambda_inf_blockwise(p: &IntervalPartition, d: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for &(lo, hi) in p.blocks() {
        let len = hi - lo + 1;
        let lf = len as f64;
        let mut local = vec![vec![0.0_f64; len]; d + 1];
        for (j, row) in local.iter_mut().enumerate() {
            for (l, e) in row.iter_mut().enumerate() {
                *e = if j == 0 {
                    1.0 / math::sqrt(lf)
                } else {
                    math::sqrt(2.0 / lf)
                        * math::cos((j as f64) * (l as f64 + 0.5) * core::f64::consts::PI / lf)
                };
            }
        }
        for l in 0..len {
            let mut row_sum = 0.0;
            for lp in 0..len {
                let mut k = 0.0;
                for row in &local {
                    k += row[l] * row[lp];
                }
                row_sum += k.abs();
            }
            worst = worst.max(row_sum);
        }
    }
    worst
}

/// Envelope-to-model containment guard used by every builder.
fn check_envelope(items: &[ModelEntry], envelope: &Subspace) -> Result<(), ModelError> {
    for e in items {
        for u in e.space.basis() {
            let resid = envelope.residual_sq(u.as_slice())?;
            if resid > 1e-9 {
                return Err(ModelError::Invalid(format!(
                    "model {} leaves the envelope (residual {resid:e})",
                    e.label
                )));
            }
        }
    }
    Ok(())
}

/// All partitions obtained by merging consecutive blocks of `finest` when it
/// has at most [`ENUMERATION_LIMIT`] blocks (`2^(k-1)` models), and the
/// dyadic ladder (consecutive runs of `2^j` finest blocks) beyond that.
fn merge_family(finest: &IntervalPartition) -> Vec<IntervalPartition> {
    let k = finest.num_blocks();
    let cuts = finest.cuts();
    let n = finest.n();
    if k <= ENUMERATION_LIMIT {
        let mut out = Vec::with_capacity(1 << (k - 1));
        for mask in 0u32..(1u32 << (k - 1)) {
            let chosen: Vec<usize> = cuts
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &c)| c)
                .collect();
            out.push(IntervalPartition::from_cuts(n, &chosen));
        }
        out.sort_by_key(|p| (p.num_blocks(), p.label()));
        out
    } else {
        let mut out = Vec::new();
        let mut run = 1usize;
        loop {
            // keep every run-th cut, merging consecutive runs of finest blocks
            let chosen: Vec<usize> = cuts
                .iter()
                .enumerate()
                .filter(|(i, _)| (i + 1) % run == 0)
                .map(|(_, &c)| c)
                .collect();
            out.push(IntervalPartition::from_cuts(n, &chosen));
            if chosen.is_empty() {
                break;
            }
            run *= 2;
        }
        out.sort_by_key(|p| (p.num_blocks(), p.label()));
        out.dedup();
        out
    }
}

/// Histogram collection over all consecutive-block merges of `finest`, with
/// weights `Delta_m = |m|`.
pub fn build_histogram_collection(finest: &IntervalPartition) -> Result<ModelCollection, ModelError> {
    let n = finest.n();
    let envelope = Subspace::from_orthonormal(n, histogram_basis(finest))?;
    let items: Vec<ModelEntry> = merge_family(finest)
        .into_iter()
        .map(|p| {
            let space = Subspace::from_orthonormal(n, histogram_basis(&p))?;
            Ok(ModelEntry {
                label: p.label(),
                delta: p.num_blocks() as f64,
                descriptor: ModelDescriptor::Blocks(p),
                space,
            })
        })
        .collect::<Result<_, ModelError>>()?;
    check_envelope(&items, &envelope)?;
    Ok(ModelCollection {
        n,
        family: FamilyKind::Histogram,
        items,
        envelope,
        join_closed: true,
    })
}

/// Piecewise-polynomial collection of a fixed degree over the same merge
/// family, weights `Delta_m = |m|`. Every block of `finest` must hold at
/// least `degree + 1` points.
pub fn build_pp_collection(
    finest: &IntervalPartition,
    degree: usize,
) -> Result<ModelCollection, ModelError> {
    let n = finest.n();
    let items: Vec<ModelEntry> = merge_family(finest)
        .into_iter()
        .map(|p| {
            let space = Subspace::from_orthonormal(n, piecewise_poly_basis(&p, degree)?)?;
            Ok(ModelEntry {
                label: p.label(),
                delta: p.num_blocks() as f64,
                descriptor: ModelDescriptor::Blocks(p),
                space,
            })
        })
        .collect::<Result<_, ModelError>>()?;
    // A degree >= 1 block system on a merged block is not inside the finest
    // span, so the envelope must be assembled as the actual sum of the model
    // spaces: orthonormalize the union of the systems on all distinct blocks.
    // Same reason the family is not closed under pairwise sums.
    let mut blocks: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in &items {
        if let ModelDescriptor::Blocks(p) = &e.descriptor {
            blocks.extend(p.blocks().iter().copied());
        }
    }
    let mut columns = Vec::with_capacity(blocks.len() * (degree + 1));
    for &(lo, hi) in &blocks {
        for j in 0..=degree {
            columns.push(dct_column(n, lo, hi, j));
        }
    }
    let envelope = Subspace::from_orthonormal(n, linalg::orthonormalize(n, &columns)?)?;
    check_envelope(&items, &envelope)?;
    Ok(ModelCollection {
        n,
        family: FamilyKind::PiecewisePoly { degree },
        items,
        envelope,
        join_closed: false,
    })
}

fn freq_label(indices: &[usize]) -> String {
    if indices.is_empty() {
        return "empty".to_string();
    }
    let mut s = String::new();
    for (i, idx) in indices.iter().enumerate() {
        if i > 0 {
            s.push('+');
        }
        s.push_str(&format!("f{idx}"));
    }
    s
}

/// Trigonometric collection over indices `{0..2*dbar}`. `Nested` builds the
/// dimension ladder (index prefixes, `2*dbar + 2` models including the empty
/// one) with `Delta = 1 + log(index + 1)`; `AllSubsets` builds every subset of
/// the ground set (requires `2*dbar + 1 <= 12`) with
/// `Delta = |m| + log C(ground, |m|)`.
pub fn build_trig_collection(
    n: usize,
    dbar: usize,
    mode: TrigMode,
) -> Result<ModelCollection, ModelError> {
    let ground: Vec<usize> = (0..=2 * dbar).collect();
    let envelope = Subspace::from_orthonormal(n, trig_basis(n, &ground)?)?;
    let mut items = Vec::new();
    match mode {
        TrigMode::Nested => {
            for (pos, dim) in (0..=ground.len()).enumerate() {
                let indices: Vec<usize> = ground[..dim].to_vec();
                let space = if indices.is_empty() {
                    Subspace::zero(n)
                } else {
                    Subspace::from_orthonormal(n, trig_basis(n, &indices)?)?
                };
                items.push(ModelEntry {
                    label: freq_label(&indices),
                    delta: 1.0 + math::ln(pos as f64 + 1.0),
                    descriptor: ModelDescriptor::Freqs(indices),
                    space,
                });
            }
        }
        TrigMode::AllSubsets => {
            let g = ground.len();
            if g > ENUMERATION_LIMIT {
                return Err(ModelError::TooManyBlocks {
                    count: g,
                    limit: ENUMERATION_LIMIT,
                });
            }
            let mut subsets: Vec<Vec<usize>> = (0u32..(1u32 << g))
                .map(|mask| {
                    ground
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            subsets.sort_by_key(|s| (s.len(), s.clone()));
            for indices in subsets {
                let space = if indices.is_empty() {
                    Subspace::zero(n)
                } else {
                    Subspace::from_orthonormal(n, trig_basis(n, &indices)?)?
                };
                items.push(ModelEntry {
                    label: freq_label(&indices),
                    delta: indices.len() as f64 + stats::ln_choose(g, indices.len()),
                    descriptor: ModelDescriptor::Freqs(indices),
                    space,
                });
            }
        }
    }
    check_envelope(&items, &envelope)?;
    Ok(ModelCollection {
        n,
        family: FamilyKind::Trigonometric { dbar },
        items,
        envelope,
        join_closed: true,
    })
}

/// Closed-form controls for the seminorms of a space spanned by `|J|` bounded
/// basis functions localized on a partition with minimum block length
/// `min_len`, each bounded by `phi` in sup norm:
/// `Lambda_2^2 <= min(|J| phi^2 / min_len, 1)` and
/// `Lambda_inf <= min(|J| phi^2, sqrt(n) Lambda_2_bound)`.
pub fn control_lambda_bounds(j: usize, phi: f64, min_len: usize, n: usize) -> (f64, f64) {
    let l2_sq = ((j as f64) * phi * phi / min_len as f64).min(1.0);
    let linf = ((j as f64) * phi * phi).min(math::sqrt(n as f64) * math::sqrt(l2_sq));
    (l2_sq, linf)
}
