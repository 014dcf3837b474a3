//! Weighted actor graph built from an [`OverlapMatrix`].
//!
//! Every actor becomes a vertex (isolated actors included). A pair becomes an
//! edge when the actors share knowledge and the selected weight exceeds the
//! threshold.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::ActorId;
use crate::model::KnowledgeBase;
use crate::overlap::OverlapMatrix;

/// Edge weight derived from the overlap of a pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// `|Σ_a ∩ Σ_b|`.
    #[default]
    Intersection,
    /// `|Σ_a ∪ Σ_b| = |Σ_a| + |Σ_b| − |Σ_a ∩ Σ_b|`.
    Union,
    /// `|Σ_a ∩ Σ_b| / min(|Σ_a|, |Σ_b|)`, always in `(0, 1]`.
    Normalized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: ActorId,
    pub target: ActorId,
    pub weight: f64,
}

/// Undirected weighted graph over actors.
///
/// Vertices are sorted; each edge is stored once with `source < target` and
/// edges are sorted by `(source, target)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct KnowledgeGraph {
    vertices: Vec<ActorId>,
    edges: Vec<Edge>,
    weight_mode: WeightMode,
    threshold: f64,
    #[serde(skip)]
    adjacency: Vec<Vec<(u32, f64)>>,
}

#[derive(Deserialize)]
struct RawGraph {
    vertices: Vec<ActorId>,
    edges: Vec<Edge>,
    weight_mode: WeightMode,
    threshold: f64,
}

impl TryFrom<RawGraph> for KnowledgeGraph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        Self::from_parts(raw.vertices, raw.edges, raw.weight_mode, raw.threshold)
    }
}

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold.is_finite() && threshold >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidGraph(format!("threshold {threshold} must be finite and >= 0")))
    }
}

impl KnowledgeGraph {
    /// Assembles a graph from explicit parts, checking every structural
    /// invariant. Edge endpoints may be given in either order.
    pub fn from_parts(
        mut vertices: Vec<ActorId>,
        edges: Vec<Edge>,
        weight_mode: WeightMode,
        threshold: f64,
    ) -> Result<Self> {
        check_threshold(threshold)?;
        vertices.sort();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate vertex {}", w[0])));
        }
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| {
                if e.source > e.target {
                    Edge {
                        source: e.target,
                        target: e.source,
                        weight: e.weight,
                    }
                } else {
                    e
                }
            })
            .collect();
        edges.sort_by(|x, y| (&x.source, &x.target).cmp(&(&y.source, &y.target)));
        for e in &edges {
            if e.source == e.target {
                return Err(Error::InvalidGraph(format!("self-loop on {}", e.source)));
            }
            for end in [&e.source, &e.target] {
                if vertices.binary_search(end).is_err() {
                    return Err(Error::UnknownVertex(end.clone()));
                }
            }
            if !(e.weight.is_finite() && e.weight > threshold) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) weight {} does not exceed threshold {threshold}",
                    e.source, e.target, e.weight
                )));
            }
            if weight_mode == WeightMode::Normalized && e.weight > 1.0 {
                return Err(Error::InvalidGraph(format!(
                    "normalized edge ({}, {}) has weight {} > 1",
                    e.source, e.target, e.weight
                )));
            }
        }
        if let Some(w) = edges
            .windows(2)
            .find(|w| w[0].source == w[1].source && w[0].target == w[1].target)
        {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].source, w[0].target
            )));
        }
        Ok(Self::assemble(vertices, edges, weight_mode, threshold))
    }

    fn assemble(vertices: Vec<ActorId>, edges: Vec<Edge>, weight_mode: WeightMode, threshold: f64) -> Self {
        let mut adjacency = vec![Vec::new(); vertices.len()];
        let position = |v: &ActorId| vertices.binary_search(v).unwrap() as u32;
        for e in &edges {
            let (s, t) = (position(&e.source), position(&e.target));
            adjacency[s as usize].push((t, e.weight));
            adjacency[t as usize].push((s, e.weight));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        Self {
            vertices,
            edges,
            weight_mode,
            threshold,
            adjacency,
        }
    }

    pub fn vertices(&self) -> &[ActorId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight_mode(&self) -> WeightMode {
        self.weight_mode
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// `|V|`.
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    /// `|E|`.
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_vertex(&self, v: &ActorId) -> bool {
        self.vertices.binary_search(v).is_ok()
    }

    /// Adjacent vertices of `v` with edge weights, in vertex order.
    pub fn neighbors(&self, v: &ActorId) -> Result<Vec<(ActorId, f64)>> {
        let i = self
            .vertex_index(v)
            .ok_or_else(|| Error::UnknownVertex(v.clone()))?;
        Ok(self.adjacency[i]
            .iter()
            .map(|&(j, w)| (self.vertices[j as usize].clone(), w))
            .collect())
    }

    pub(crate) fn vertex_index(&self, v: &ActorId) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    pub(crate) fn adjacency(&self, i: usize) -> &[(u32, f64)] {
        &self.adjacency[i]
    }

    /// Connected components as sorted vertex-index lists, ordered by their
    /// smallest member.
    pub(crate) fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for root in 0..self.order() {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            queue.push_back(root);
            let mut members = Vec::new();
            while let Some(v) = queue.pop_front() {
                members.push(v);
                for &(u, _) in &self.adjacency[v] {
                    let u = u as usize;
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn stats(&self) -> GraphStats {
        let mut degree_histogram = BTreeMap::new();
        for list in &self.adjacency {
            *degree_histogram.entry(list.len()).or_insert(0) += 1;
        }
        let components = self.components();
        GraphStats {
            order: self.order(),
            size: self.size(),
            degree_histogram,
            component_count: components.len(),
            largest_component: components.iter().map(Vec::len).max().unwrap_or(0),
        }
    }
}

/// Structural summary of a [`KnowledgeGraph`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub order: usize,
    pub size: usize,
    /// degree → number of vertices with that degree
    pub degree_histogram: BTreeMap<usize, usize>,
    pub component_count: usize,
    pub largest_component: usize,
}

/// Maps actors to vertices and nonzero overlaps to weighted edges.
///
/// Only pairs with positive overlap are edge candidates; among those, an edge
/// is kept when its weight is strictly greater than `threshold`. Union and
/// normalized weights use the matrix diagonal as `|Σ|`.
///
/// ```
/// use knowshare::{build_graph, overlap_matrix, KnowledgeBase, OverlapMode, WeightMode};
///
/// let kb = KnowledgeBase::from_sets([
///     ("a", vec!["g1", "g2"]),
///     ("b", vec!["g2", "g3"]),
///     ("c", vec!["g4"]),
/// ])?;
/// let matrix = overlap_matrix(&kb, OverlapMode::Count);
/// let g = build_graph(&kb, &matrix, WeightMode::Intersection, 0.0)?;
/// assert_eq!(g.order(), 3);
/// assert_eq!(g.size(), 1);
/// assert_eq!(g.edges()[0].weight, 1.0);
/// # Ok::<(), knowshare::Error>(())
/// ```
pub fn build_graph(
    kb: &KnowledgeBase,
    matrix: &OverlapMatrix,
    weight_mode: WeightMode,
    threshold: f64,
) -> Result<KnowledgeGraph> {
    check_threshold(threshold)?;
    if matrix.actors() != kb.actors() {
        return Err(Error::MatrixMismatch);
    }
    let actors = matrix.actors();
    let edges = matrix
        .index_entries()
        .filter_map(|(i, j, shared)| {
            let weight = match weight_mode {
                WeightMode::Intersection => shared,
                WeightMode::Union => matrix.get_by_index(i, i) + matrix.get_by_index(j, j) - shared,
                WeightMode::Normalized => shared / matrix.get_by_index(i, i).min(matrix.get_by_index(j, j)),
            };
            (weight > threshold).then(|| Edge {
                source: actors[i].clone(),
                target: actors[j].clone(),
                weight,
            })
        })
        .collect();
    Ok(KnowledgeGraph::assemble(actors.to_vec(), edges, weight_mode, threshold))
}
