//! Knowledge-overlap networks.
//!
//! Each actor knows a weighted set of *generators*. Two actors share
//! knowledge to the extent their generator sets intersect; the pairwise
//! overlaps define a weighted actor graph, over which the spread of a trait
//! (a disease, a rumour, a skill) can be simulated.
//!
//! The pipeline is:
//!
//! 1. [`KnowledgeBase`]: actors, the generator universe and weights `f(σ)`.
//! 2. [`overlap_matrix`]: sparse all-pairs `|Σ_a ∩ Σ_b|` through an
//!    [`InvertedIndex`].
//! 3. [`build_graph`]: actors become vertices, positive overlaps edges.
//! 4. [`simulate`], [`monte_carlo`], [`trace_root`]: SI and independent-cascade
//!    spread on the graph.
//!
//! ```
//! use knowshare::*;
//!
//! let kb = KnowledgeBase::from_sets([
//!     ("a1", vec!["g1", "g2"]),
//!     ("a2", vec!["g2"]),
//!     ("a3", vec!["g9"]),
//! ])?;
//! let matrix = overlap_matrix(&kb, OverlapMode::Count);
//! let graph = build_graph(&kb, &matrix, WeightMode::Intersection, 0.0)?;
//! let cfg = SpreadConfig::new(SpreadModel::Si, [ActorId::new("a1")?]);
//! let trace = simulate(&graph, &cfg)?;
//! assert_eq!(trace.final_infected.len(), 2);
//! # Ok::<(), knowshare::Error>(())
//! ```
//!
//! A longer walk-through lives in the `book/` directory of the repository.

pub mod cli;
pub mod diffusion;
pub mod error;
pub mod graph;
pub mod ids;
pub mod io;
pub mod model;
pub mod overlap;

pub use diffusion::{
    monte_carlo, monte_carlo_counts, simulate, trace_root, trial_seed, SpreadConfig, SpreadModel, SpreadTrace,
    Transmission,
};
pub use error::{Error, Result};
pub use graph::{build_graph, Edge, GraphStats, KnowledgeGraph, WeightMode};
pub use ids::{ActorId, GeneratorId, SituationId};
pub use model::{KnowledgeBase, KnowledgeBaseBuilder, Sigma, SituationUniverse};
pub use overlap::{brute_force_matrix, overlap_matrix, pairwise_overlap, InvertedIndex, OverlapMatrix, OverlapMode};

// The book's chapters are compiled as doc tests so their snippets stay in
// sync with the API.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/knowledge.md")]
    pub mod knowledge {}
    #[doc = include_str!("../../../book/src/overlap.md")]
    pub mod overlap {}
    #[doc = include_str!("../../../book/src/graph.md")]
    pub mod graph {}
    #[doc = include_str!("../../../book/src/diffusion.md")]
    pub mod diffusion {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
