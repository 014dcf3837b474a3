//! Spread of a trait (a disease, a piece of knowledge) over a
//! [`KnowledgeGraph`].
//!
//! Two discrete-round models are supported:
//!
//! * **SI**: every infected vertex tries every susceptible neighbour in every
//!   round. A run stops after `max_rounds` or once no infected vertex has a
//!   susceptible neighbour; a round without a new infection does not end it.
//! * **IC** (independent cascade): a vertex tries its susceptible neighbours
//!   once, in the round after it was infected.
//!
//! Within a round, the attempts are the edges `(source, target)` with
//! `source` infected and `target` susceptible at the start of the round,
//! examined in lexicographic `(source, target)` order. An attempt succeeds
//! when its uniform draw `u ∈ [0, 1)` is below the edge's transmission
//! probability `p`.
//!
//! # Randomness
//!
//! Draws are keyed rather than streamed. A run seeded with `s` uses
//! `ChaCha8Rng::seed_from_u64(s)` as a random-access source: the draw for
//! the attempt `source → target` in round `r` is the `u64` at word position
//! `2 · (source · |V| + target)` of ChaCha stream `r` (SI) or stream 0 (IC,
//! where each directed edge is tried at most once), mapped to `[0, 1)` by
//! `rand`'s standard `f64` conversion. Vertex numbers are positions in the
//! sorted vertex list. Since a draw never depends on which other attempts
//! happened, adding seeds can only enlarge the infected set for a fixed
//! seed.
//!
//! Monte Carlo trial `t` of a configuration with master seed `s` runs with
//! seed [`trial_seed(s, t)`](trial_seed), the `(t + 1)`-th output of a
//! SplitMix64 stream started at `s`. Trial seeds depend only on `(s, t)`, so
//! estimates are identical whatever the thread count.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{KnowledgeGraph, WeightMode};
use crate::ids::ActorId;

/// Score threshold above which [`trace_root`] counts a vertex as expected
/// to be infected.
pub const EXPECTED_INFECTION_THRESHOLD: f64 = 0.5;

pub const DEFAULT_LAMBDA: f64 = 1.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SpreadModel {
    #[default]
    Si,
    Ic,
}

/// Edge weight → per-attempt transmission probability.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Transmission {
    /// `p = 1` on every edge.
    #[default]
    Unit,
    /// `p = weight`; needs a normalized-mode graph.
    Proportional,
    /// `p = 1 − exp(−λ · weight)`.
    Scaled { lambda: f64 },
}

impl Transmission {
    fn probability(self, weight: f64) -> f64 {
        match self {
            Transmission::Unit => 1.0,
            Transmission::Proportional => weight,
            Transmission::Scaled { lambda } => 1.0 - (-lambda * weight).exp(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadConfig {
    pub model: SpreadModel,
    pub seeds: BTreeSet<ActorId>,
    pub max_rounds: u32,
    pub transmission: Transmission,
    pub rng_seed: u64,
}

impl SpreadConfig {
    pub fn new(model: SpreadModel, seeds: impl IntoIterator<Item = ActorId>) -> Self {
        Self {
            model,
            seeds: seeds.into_iter().collect(),
            max_rounds: 100,
            transmission: Transmission::Unit,
            rng_seed: 0,
        }
    }

    pub fn with_transmission(mut self, transmission: Transmission) -> Self {
        self.transmission = transmission;
        self
    }

    pub fn with_max_rounds(mut self, max_rounds: u32) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn with_rng_seed(mut self, rng_seed: u64) -> Self {
        self.rng_seed = rng_seed;
        self
    }

    fn check_dynamics(&self, g: &KnowledgeGraph) -> Result<()> {
        if self.max_rounds == 0 {
            return Err(Error::InvalidConfig("max_rounds must be at least 1".into()));
        }
        match self.transmission {
            Transmission::Unit => {}
            Transmission::Proportional => {
                if g.weight_mode() != WeightMode::Normalized {
                    return Err(Error::InvalidConfig(
                        "proportional transmission requires a normalized-mode graph".into(),
                    ));
                }
            }
            Transmission::Scaled { lambda } => {
                if !(lambda.is_finite() && lambda > 0.0) {
                    return Err(Error::InvalidConfig(format!("lambda {lambda} must be finite and > 0")));
                }
            }
        }
        Ok(())
    }

    /// Seed vertex indices, after checking the whole configuration against `g`.
    fn seed_indices(&self, g: &KnowledgeGraph) -> Result<Vec<usize>> {
        self.check_dynamics(g)?;
        if self.seeds.is_empty() {
            return Err(Error::EmptySeeds);
        }
        self.seeds
            .iter()
            .map(|s| g.vertex_index(s).ok_or_else(|| Error::UnknownSeed(s.clone())))
            .collect()
    }
}

/// Per-round record of one simulation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadTrace {
    /// Newly infected vertices per round; round 0 holds the seeds. SI rounds
    /// without a new infection are recorded as empty sets while some
    /// infected vertex still has a susceptible neighbour; trailing empty
    /// rounds are dropped.
    pub rounds: Vec<BTreeSet<ActorId>>,
    pub final_infected: BTreeSet<ActorId>,
    pub config_echo: SpreadConfig,
}

/// Seed of Monte Carlo trial `trial` under master seed `master`.
///
/// This is output number `trial + 1` of SplitMix64 started from `master`;
/// the mapping is part of the reproducibility contract and will not change.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master.wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs the spread process and returns vertex-index rounds.
fn run(g: &KnowledgeGraph, cfg: &SpreadConfig, seeds: &[usize], rng_seed: u64) -> (Vec<Vec<usize>>, Vec<bool>) {
    let n = g.order();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut infected = vec![false; n];
    let mut hit = vec![false; n];
    let mut frontier: Vec<usize> = seeds.to_vec();
    frontier.sort_unstable();
    frontier.dedup();
    for &s in &frontier {
        infected[s] = true;
    }
    let mut rounds = vec![frontier.clone()];

    for round in 1..=u64::from(cfg.max_rounds) {
        let mut fresh = Vec::new();
        let stream = match cfg.model {
            SpreadModel::Si => round,
            SpreadModel::Ic => 0,
        };
        rng.set_stream(stream);
        let mut attempt = |source: usize, rng: &mut ChaCha8Rng| {
            for &(target, weight) in g.adjacency(source) {
                let target = target as usize;
                if infected[target] {
                    continue;
                }
                rng.set_word_pos(2 * (source as u128 * n as u128 + target as u128));
                let draw: f64 = rng.random();
                if draw < cfg.transmission.probability(weight) && !hit[target] {
                    hit[target] = true;
                    fresh.push(target);
                }
            }
        };
        match cfg.model {
            SpreadModel::Si => {
                for source in (0..n).filter(|&v| infected[v]) {
                    attempt(source, &mut rng);
                }
            }
            SpreadModel::Ic => {
                for &source in &frontier {
                    attempt(source, &mut rng);
                }
            }
        }
        if fresh.is_empty() {
            let exposed = cfg.model == SpreadModel::Si
                && (0..n).any(|v| infected[v] && g.adjacency(v).iter().any(|&(t, _)| !infected[t as usize]));
            if !exposed {
                break;
            }
        }
        fresh.sort_unstable();
        for &v in &fresh {
            infected[v] = true;
            hit[v] = false;
        }
        rounds.push(fresh.clone());
        frontier = fresh;
    }
    while rounds.last().is_some_and(Vec::is_empty) {
        rounds.pop();
    }
    (rounds, infected)
}

/// One simulation, seeded with `cfg.rng_seed`.
///
/// ```
/// use knowshare::{simulate, Edge, KnowledgeGraph, SpreadConfig, SpreadModel, WeightMode, ActorId};
///
/// let id = |s: &str| ActorId::new(s).unwrap();
/// let edge = |s, t| Edge { source: id(s), target: id(t), weight: 1.0 };
/// let g = KnowledgeGraph::from_parts(
///     vec![id("a"), id("b"), id("c")],
///     vec![edge("a", "b"), edge("b", "c")],
///     WeightMode::Intersection,
///     0.0,
/// )?;
/// let trace = simulate(&g, &SpreadConfig::new(SpreadModel::Si, [id("a")]))?;
/// assert_eq!(trace.rounds.len(), 3);
/// assert!(trace.rounds[2].contains(&id("c")));
/// # Ok::<(), knowshare::Error>(())
/// ```
pub fn simulate(g: &KnowledgeGraph, cfg: &SpreadConfig) -> Result<SpreadTrace> {
    let seeds = cfg.seed_indices(g)?;
    let (rounds, infected) = run(g, cfg, &seeds, cfg.rng_seed);
    let vertices = g.vertices();
    Ok(SpreadTrace {
        rounds: rounds
            .into_iter()
            .map(|r| r.into_iter().map(|v| vertices[v].clone()).collect())
            .collect(),
        final_infected: infected
            .iter()
            .enumerate()
            .filter(|(_, &x)| x)
            .map(|(v, _)| vertices[v].clone())
            .collect(),
        config_echo: cfg.clone(),
    })
}

/// Number of trials, out of `trials`, in which each vertex ended infected.
///
/// Trials run in parallel on the current rayon pool.
pub fn monte_carlo_counts(g: &KnowledgeGraph, cfg: &SpreadConfig, trials: u64) -> Result<BTreeMap<ActorId, u64>> {
    let seeds = cfg.seed_indices(g)?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let n = g.order();
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; n],
            |mut acc, t| {
                let (_, infected) = run(g, cfg, &seeds, trial_seed(cfg.rng_seed, t));
                for (slot, hit) in acc.iter_mut().zip(infected) {
                    *slot += u64::from(hit);
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(g.vertices().iter().cloned().zip(counts).collect())
}

/// Estimated infection probability of every vertex over `trials` runs.
pub fn monte_carlo(g: &KnowledgeGraph, cfg: &SpreadConfig, trials: u64) -> Result<BTreeMap<ActorId, f64>> {
    Ok(monte_carlo_counts(g, cfg, trials)?
        .into_iter()
        .map(|(v, c)| (v, c as f64 / trials as f64))
        .collect())
}

/// Ranks candidate origins of an observed infected set.
///
/// Each infected vertex `c` is tried as the sole seed; its score is the
/// Jaccard similarity between the observed set and the vertices whose
/// estimated infection probability is at least
/// [`EXPECTED_INFECTION_THRESHOLD`]. `cfg.seeds` is ignored. Higher scores
/// come first; ties are ordered by vertex id.
pub fn trace_root(
    g: &KnowledgeGraph,
    infected: &BTreeSet<ActorId>,
    cfg: &SpreadConfig,
    trials: u64,
) -> Result<Vec<(ActorId, f64)>> {
    if infected.is_empty() {
        return Err(Error::EmptyInfected);
    }
    if let Some(v) = infected.iter().find(|v| !g.contains_vertex(v)) {
        return Err(Error::UnknownVertex(v.clone()));
    }
    let mut ranked = infected
        .iter()
        .map(|candidate| {
            let single = SpreadConfig {
                seeds: BTreeSet::from([candidate.clone()]),
                ..cfg.clone()
            };
            let estimate = monte_carlo(g, &single, trials)?;
            let expected: BTreeSet<&ActorId> = estimate
                .iter()
                .filter(|(_, &p)| p >= EXPECTED_INFECTION_THRESHOLD)
                .map(|(v, _)| v)
                .collect();
            let shared = infected.iter().filter(|v| expected.contains(v)).count();
            let union = expected.len() + infected.len() - shared;
            Ok((candidate.clone(), shared as f64 / union as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    Ok(ranked)
}
