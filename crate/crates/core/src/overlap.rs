//! Pairwise shared knowledge `|Σ_a ∩ Σ_b|` for every actor pair.
//!
//! [`overlap_matrix`] turns the all-pairs intersection into a scan over an
//! [`InvertedIndex`]: for each actor `a`, every posting list of a generator
//! held by `a` contributes one unit (or `min(f_a, f_b)`) to each later actor
//! `b` on that list. Work is proportional to the number of co-occurrences and
//! memory to the number of nonzero pairs; the dense `n × n` matrix never
//! exists. [`brute_force_matrix`] is the nested-loop reference.

use std::ops::{AddAssign, Range};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{ActorId, GeneratorId};
use crate::model::{KnowledgeBase, Sigma};

/// Upper bound on actors accepted by [`brute_force_matrix`].
pub const ORACLE_ACTOR_LIMIT: usize = 1000;

const ROWS_PER_CHUNK: usize = 512;

/// How a shared generator contributes to an overlap.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OverlapMode {
    /// `|Σ_a ∩ Σ_b|`, an exact integer.
    #[default]
    Count,
    /// Sum over shared generators of `min(f_a(σ), f_b(σ))`.
    WeightedMin,
}

/// Generator → actors posting lists over a [`KnowledgeBase`].
///
/// Actors and generators are addressed by their position in the knowledge
/// base's sorted actor list and universe. Each posting list is sorted by
/// actor and holds an actor at most once.
#[derive(Clone, Debug, PartialEq)]
pub struct InvertedIndex {
    actors: Vec<ActorId>,
    generators: Vec<GeneratorId>,
    row_offsets: Vec<usize>,
    row_entries: Vec<(u32, f64)>,
    posting_offsets: Vec<usize>,
    posting_entries: Vec<(u32, f64)>,
}

impl InvertedIndex {
    pub fn build(kb: &KnowledgeBase) -> Self {
        let actors = kb.actors().to_vec();
        let generators = kb.universe().to_vec();
        assert!(actors.len() <= u32::MAX as usize && generators.len() <= u32::MAX as usize);

        let mut row_offsets = Vec::with_capacity(actors.len() + 1);
        let mut row_entries = Vec::new();
        let mut posting_lens = vec![0usize; generators.len()];
        row_offsets.push(0);
        for (_, sigma) in kb.iter() {
            for (generator, &weight) in sigma {
                let g = generators
                    .binary_search(generator)
                    .expect("knowledge base universe is closed over sigma");
                posting_lens[g] += 1;
                row_entries.push((g as u32, weight));
            }
            row_offsets.push(row_entries.len());
        }

        let mut posting_offsets = Vec::with_capacity(generators.len() + 1);
        posting_offsets.push(0);
        for len in &posting_lens {
            posting_offsets.push(posting_offsets.last().unwrap() + len);
        }
        let mut cursor = posting_offsets[..generators.len()].to_vec();
        let mut posting_entries = vec![(0u32, 0.0f64); row_entries.len()];
        for actor in 0..actors.len() {
            for &(g, weight) in &row_entries[row_offsets[actor]..row_offsets[actor + 1]] {
                let slot = &mut cursor[g as usize];
                posting_entries[*slot] = (actor as u32, weight);
                *slot += 1;
            }
        }

        Self {
            actors,
            generators,
            row_offsets,
            row_entries,
            posting_offsets,
            posting_entries,
        }
    }

    pub fn actors(&self) -> &[ActorId] {
        &self.actors
    }

    pub fn generators(&self) -> &[GeneratorId] {
        &self.generators
    }

    /// Actors holding `generator`, in actor order, with their weights.
    pub fn postings(&self, generator: &GeneratorId) -> Option<impl Iterator<Item = (&ActorId, f64)>> {
        let g = self.generators.binary_search(generator).ok()?;
        Some(
            self.posting(g)
                .iter()
                .map(|&(a, w)| (&self.actors[a as usize], w)),
        )
    }

    /// Rebuilds the knowledge base from the posting lists alone.
    pub fn to_knowledge_base(&self) -> KnowledgeBase {
        let mut builder = KnowledgeBase::builder();
        for actor in &self.actors {
            builder.add_actor(actor.clone());
        }
        for (g, generator) in self.generators.iter().enumerate() {
            builder.add_generator(generator.clone());
            for &(a, weight) in self.posting(g) {
                builder
                    .insert(self.actors[a as usize].clone(), generator.clone(), weight)
                    .expect("indexed weights were validated on ingestion");
            }
        }
        builder.build()
    }

    fn row(&self, actor: usize) -> &[(u32, f64)] {
        &self.row_entries[self.row_offsets[actor]..self.row_offsets[actor + 1]]
    }

    fn posting(&self, generator: usize) -> &[(u32, f64)] {
        &self.posting_entries[self.posting_offsets[generator]..self.posting_offsets[generator + 1]]
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Values {
    Count(Vec<u32>),
    Weighted(Vec<f64>),
}

impl Values {
    fn get(&self, k: usize) -> f64 {
        match self {
            Values::Count(v) => f64::from(v[k]),
            Values::Weighted(v) => v[k],
        }
    }
}

/// Sparse symmetric matrix of pairwise overlaps.
///
/// Stored as upper-triangular rows in actor order: each unordered pair
/// appears once, under its lexicographically smaller actor, and only when
/// the overlap is nonzero. The diagonal (`|Σ_a|`, or the weight sum in
/// weighted mode) is kept separately and is never part of [`entries`](Self::entries).
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapMatrix {
    actors: Vec<ActorId>,
    mode: OverlapMode,
    diagonal: Vec<f64>,
    row_offsets: Vec<usize>,
    cols: Vec<u32>,
    values: Values,
}

impl OverlapMatrix {
    fn empty(kb: &KnowledgeBase, mode: OverlapMode) -> Self {
        let diagonal = kb.iter().map(|(_, s)| self_overlap(s, mode)).collect();
        Self {
            actors: kb.actors().to_vec(),
            mode,
            diagonal,
            row_offsets: vec![0],
            cols: Vec::new(),
            values: match mode {
                OverlapMode::Count => Values::Count(Vec::new()),
                OverlapMode::WeightedMin => Values::Weighted(Vec::new()),
            },
        }
    }

    pub fn actors(&self) -> &[ActorId] {
        &self.actors
    }

    pub fn mode(&self) -> OverlapMode {
        self.mode
    }

    /// Number of stored (nonzero, off-diagonal) pairs.
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Overlap of any two actors, including `a == b` and absent (zero) pairs.
    pub fn get(&self, a: &ActorId, b: &ActorId) -> Result<f64> {
        let i = self.position(a)?;
        let j = self.position(b)?;
        Ok(self.get_by_index(i, j))
    }

    pub(crate) fn get_by_index(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diagonal[i];
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let range = self.row_offsets[lo]..self.row_offsets[lo + 1];
        match self.cols[range.clone()].binary_search(&(hi as u32)) {
            Ok(k) => self.values.get(range.start + k),
            Err(_) => 0.0,
        }
    }

    /// Nonzero pairs `(a, b, overlap)` with `a < b`, sorted by `(a, b)`.
    pub fn entries(&self) -> impl Iterator<Item = (&ActorId, &ActorId, f64)> + '_ {
        self.index_entries()
            .map(|(i, j, v)| (&self.actors[i], &self.actors[j], v))
    }

    pub(crate) fn index_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.actors.len()).flat_map(move |i| {
            (self.row_offsets[i]..self.row_offsets[i + 1])
                .map(move |k| (i, self.cols[k] as usize, self.values.get(k)))
        })
    }

    /// Bytes held by the matrix's buffers. Grows with `nnz + actors`, never
    /// with `actors²`.
    pub fn heap_size_bytes(&self) -> usize {
        let values = match &self.values {
            Values::Count(v) => v.capacity() * std::mem::size_of::<u32>(),
            Values::Weighted(v) => v.capacity() * std::mem::size_of::<f64>(),
        };
        self.actors.capacity() * std::mem::size_of::<ActorId>()
            + self.actors.iter().map(|a| a.as_str().len()).sum::<usize>()
            + self.diagonal.capacity() * std::mem::size_of::<f64>()
            + self.row_offsets.capacity() * std::mem::size_of::<usize>()
            + self.cols.capacity() * std::mem::size_of::<u32>()
            + values
    }

    fn position(&self, actor: &ActorId) -> Result<usize> {
        self.actors
            .binary_search(actor)
            .map_err(|_| Error::UnknownActor(actor.clone()))
    }

    fn push_pair(&mut self, col: usize, value: f64) {
        self.cols.push(col as u32);
        match &mut self.values {
            Values::Count(v) => v.push(value as u32),
            Values::Weighted(v) => v.push(value),
        }
    }

    fn end_row(&mut self) {
        self.row_offsets.push(self.cols.len());
    }
}

fn self_overlap(sigma: &Sigma, mode: OverlapMode) -> f64 {
    match mode {
        OverlapMode::Count => sigma.len() as f64,
        OverlapMode::WeightedMin => sigma.values().sum(),
    }
}

/// Merge-join over two generator maps; shared generators are visited in
/// generator order.
fn intersect(a: &Sigma, b: &Sigma, mode: OverlapMode) -> f64 {
    let mut left = a.iter().peekable();
    let mut right = b.iter().peekable();
    let mut total = 0.0;
    while let (Some((ga, wa)), Some((gb, wb))) = (left.peek(), right.peek()) {
        match ga.cmp(gb) {
            std::cmp::Ordering::Less => {
                left.next();
            }
            std::cmp::Ordering::Greater => {
                right.next();
            }
            std::cmp::Ordering::Equal => {
                total += match mode {
                    OverlapMode::Count => 1.0,
                    OverlapMode::WeightedMin => wa.min(**wb),
                };
                left.next();
                right.next();
            }
        }
    }
    total
}

/// Overlap of a single pair, straight from the two generator sets.
pub fn pairwise_overlap(kb: &KnowledgeBase, a: &ActorId, b: &ActorId, mode: OverlapMode) -> Result<f64> {
    Ok(intersect(kb.sigma(a)?, kb.sigma(b)?, mode))
}

/// Nested-loop reference: [`pairwise_overlap`] on every pair.
pub fn brute_force_matrix(kb: &KnowledgeBase, mode: OverlapMode) -> Result<OverlapMatrix> {
    if kb.actors().len() > ORACLE_ACTOR_LIMIT {
        return Err(Error::OracleLimitExceeded {
            actors: kb.actors().len(),
            limit: ORACLE_ACTOR_LIMIT,
        });
    }
    let sigmas: Vec<&Sigma> = kb.iter().map(|(_, s)| s).collect();
    let mut matrix = OverlapMatrix::empty(kb, mode);
    for i in 0..sigmas.len() {
        for j in i + 1..sigmas.len() {
            let value = intersect(sigmas[i], sigmas[j], mode);
            if value > 0.0 {
                matrix.push_pair(j, value);
            }
        }
        matrix.end_row();
    }
    Ok(matrix)
}

/// All-pairs overlaps through an [`InvertedIndex`].
///
/// Rows are computed in parallel on the current rayon pool and appended in
/// actor order, so the result does not depend on the number of threads.
pub fn overlap_matrix(kb: &KnowledgeBase, mode: OverlapMode) -> OverlapMatrix {
    let index = InvertedIndex::build(kb);
    overlap_matrix_from_index(kb, &index, mode)
}

pub fn overlap_matrix_from_index(kb: &KnowledgeBase, index: &InvertedIndex, mode: OverlapMode) -> OverlapMatrix {
    let mut matrix = OverlapMatrix::empty(kb, mode);
    match mode {
        OverlapMode::Count => scan_all::<u32>(index, &mut matrix),
        OverlapMode::WeightedMin => scan_all::<f64>(index, &mut matrix),
    }
    matrix
}

trait Cell: Copy + Default + PartialEq + AddAssign + Send + Into<f64> {
    fn contribution(a: f64, b: f64) -> Self;
}

impl Cell for u32 {
    fn contribution(_: f64, _: f64) -> u32 {
        1
    }
}

impl Cell for f64 {
    fn contribution(a: f64, b: f64) -> f64 {
        a.min(b)
    }
}

struct Fragment<V> {
    row_lens: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<V>,
}

fn scan_all<V: Cell>(index: &InvertedIndex, matrix: &mut OverlapMatrix) {
    let n = index.actors.len();
    let batch = ROWS_PER_CHUNK * rayon::current_num_threads().max(1) * 2;
    for batch_start in (0..n).step_by(batch) {
        let batch_end = (batch_start + batch).min(n);
        let fragments: Vec<Fragment<V>> = (batch_start..batch_end)
            .step_by(ROWS_PER_CHUNK)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|start| scan_rows::<V>(index, start..(start + ROWS_PER_CHUNK).min(batch_end)))
            .collect();
        for fragment in fragments {
            let mut k = 0;
            for len in fragment.row_lens {
                for _ in 0..len {
                    matrix.push_pair(fragment.cols[k] as usize, fragment.values[k].into());
                    k += 1;
                }
                matrix.end_row();
            }
        }
    }
}

/// Accumulates rows `rows` of the upper triangle into a dense scratch
/// vector, tracking touched columns in a bitset so each row is emitted in
/// column order without sorting.
fn scan_rows<V: Cell>(index: &InvertedIndex, rows: Range<usize>) -> Fragment<V> {
    let n = index.actors.len();
    let mut acc = vec![V::default(); n];
    let mut touched = vec![0u64; n.div_ceil(64)];
    let mut fragment = Fragment {
        row_lens: Vec::with_capacity(rows.len()),
        cols: Vec::new(),
        values: Vec::new(),
    };
    for i in rows {
        let before = fragment.cols.len();
        let mut hi_word = 0;
        for &(g, wa) in index.row(i) {
            let posting = index.posting(g as usize);
            let from = posting.partition_point(|&(j, _)| j as usize <= i);
            for &(j, wb) in &posting[from..] {
                let j = j as usize;
                acc[j] += V::contribution(wa, wb);
                touched[j / 64] |= 1 << (j % 64);
                hi_word = hi_word.max(j / 64 + 1);
            }
        }
        let lo_word = (i + 1) / 64;
        for (w, slot) in touched.iter_mut().enumerate().take(hi_word).skip(lo_word) {
            let mut word = std::mem::take(slot);
            while word != 0 {
                let j = w * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                fragment.cols.push(j as u32);
                fragment.values.push(std::mem::take(&mut acc[j]));
            }
        }
        fragment.row_lens.push(fragment.cols.len() - before);
    }
    fragment
}
