#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use knowshare::{ActorId, Edge, GeneratorId, KnowledgeBase, KnowledgeGraph, SituationId, SituationUniverse, WeightMode};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

pub fn id(s: &str) -> ActorId {
    ActorId::new(s).unwrap()
}

pub fn gid(s: &str) -> GeneratorId {
    GeneratorId::new(s).unwrap()
}

pub fn actor_name(i: usize) -> String {
    format!("a{i:05}")
}

pub fn generator_name(i: usize) -> String {
    format!("g{i:05}")
}

/// Uniform random knowledge base: each actor holds up to `max_per_actor`
/// generators drawn from `universe`; some actors end up empty.
pub fn random_kb(rng: &mut impl Rng, actors: usize, universe: usize, max_per_actor: usize, weighted: bool) -> KnowledgeBase {
    let all: Vec<usize> = (0..universe).collect();
    KnowledgeBase::from_weighted_sets((0..actors).map(|a| {
        let k = rng.random_range(0..=max_per_actor.min(universe));
        let gens: Vec<(String, f64)> = all
            .choose_multiple(rng, k)
            .map(|&g| {
                let w = if weighted { rng.random_range(0.05..=1.0) } else { 1.0 };
                (generator_name(g), w)
            })
            .collect();
        (actor_name(a), gens)
    }))
    .unwrap()
}

/// `actors` actors with `per_actor` distinct generators each, drawn from a
/// Zipf(`exponent`) popularity law over `universe` generators.
pub fn zipf_kb(seed: u64, actors: usize, per_actor: usize, universe: usize, exponent: f64) -> KnowledgeBase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zipf = Zipf::new(universe as f64, exponent).unwrap();
    let names: Vec<String> = (0..universe).map(generator_name).collect();
    KnowledgeBase::from_sets((0..actors).map(|a| {
        let mut held = BTreeSet::new();
        while held.len() < per_actor {
            held.insert(zipf.sample(&mut rng) as usize - 1);
        }
        (actor_name(a), held.into_iter().map(|g| names[g].as_str()).collect::<Vec<_>>())
    }))
    .unwrap()
}

pub fn generator_set(kb: &KnowledgeBase, actor: &ActorId) -> BTreeSet<GeneratorId> {
    kb.sigma(actor).unwrap().keys().cloned().collect()
}

/// Proptest strategy for small knowledge bases over a 12-generator universe.
pub fn arb_kb() -> impl Strategy<Value = KnowledgeBase> {
    let sigma = prop::collection::btree_map(0usize..12, prop_oneof![Just(1.0), 0.01f64..=1.0], 0..8);
    prop::collection::vec(sigma, 0..12).prop_map(|actors| {
        KnowledgeBase::from_weighted_sets(
            actors
                .into_iter()
                .enumerate()
                .map(|(a, s)| (actor_name(a), s.into_iter().map(|(g, w)| (generator_name(g), w)))),
        )
        .unwrap()
    })
}

pub fn arb_universe() -> impl Strategy<Value = SituationUniverse> {
    prop::collection::vec(prop::collection::btree_set(0usize..8, 0..8), 0..10).prop_map(random_universe)
}

pub fn random_universe(rows: Vec<BTreeSet<usize>>) -> SituationUniverse {
    let mut u = SituationUniverse::new((0..rows.len()).map(|m| SituationId::new(format!("m{m}")).unwrap()));
    for (m, gens) in rows.into_iter().enumerate() {
        for g in gens {
            u.satisfy(SituationId::new(format!("m{m}")).unwrap(), gid(&generator_name(g)));
        }
    }
    u
}

pub fn graph_from(vertices: &[&str], edges: &[(&str, &str, f64)], mode: WeightMode) -> KnowledgeGraph {
    KnowledgeGraph::from_parts(
        vertices.iter().map(|v| id(v)).collect(),
        edges
            .iter()
            .map(|&(s, t, w)| Edge {
                source: id(s),
                target: id(t),
                weight: w,
            })
            .collect(),
        mode,
        0.0,
    )
    .unwrap()
}

/// Random graph over `n` vertices with each pair present with probability
/// `density` and weights in (0, 1].
pub fn random_graph(rng: &mut impl Rng, n: usize, density: f64) -> KnowledgeGraph {
    let vertices: Vec<ActorId> = (0..n).map(|i| id(&actor_name(i))).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                edges.push(Edge {
                    source: vertices[i].clone(),
                    target: vertices[j].clone(),
                    weight: rng.random_range(0.05..=1.0),
                });
            }
        }
    }
    KnowledgeGraph::from_parts(vertices, edges, WeightMode::Normalized, 0.0).unwrap()
}

/// BFS hop distances from `sources`.
pub fn hop_distances(g: &KnowledgeGraph, sources: &BTreeSet<ActorId>) -> BTreeMap<ActorId, usize> {
    let mut dist = BTreeMap::new();
    let mut queue = VecDeque::new();
    for s in sources {
        dist.insert(s.clone(), 0);
        queue.push_back(s.clone());
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for (u, _) in g.neighbors(&v).unwrap() {
            if !dist.contains_key(&u) {
                dist.insert(u.clone(), d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}
