//! Actors, generators and per-actor knowledge.
//!
//! Each actor holds a set of generators together with the single-generator
//! disseminator value `f(σ) ∈ (0, 1]`. A generator an actor does not hold has
//! `f(σ) = 0`; zero weights are never stored.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{ActorId, GeneratorId, SituationId};

/// Generator weights held by one actor, ordered by generator.
pub type Sigma = BTreeMap<GeneratorId, f64>;

pub(crate) fn check_weight(actor: &ActorId, generator: &GeneratorId, weight: f64) -> Result<()> {
    if weight > 0.0 && weight <= 1.0 {
        Ok(())
    } else {
        Err(Error::WeightOutOfRange {
            actor: actor.clone(),
            generator: generator.clone(),
            weight,
        })
    }
}

/// The actor set `A`, the generator universe `Y`, and every actor's weighted
/// generator set.
///
/// Immutable once built. Actors iterate in lexicographic order of their ids.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKnowledgeBase")]
pub struct KnowledgeBase {
    actors: Vec<ActorId>,
    universe: Vec<GeneratorId>,
    sigma: BTreeMap<ActorId, Sigma>,
}

#[derive(Deserialize)]
struct RawKnowledgeBase {
    actors: Vec<ActorId>,
    universe: Vec<GeneratorId>,
    sigma: BTreeMap<ActorId, Sigma>,
}

impl TryFrom<RawKnowledgeBase> for KnowledgeBase {
    type Error = Error;

    fn try_from(raw: RawKnowledgeBase) -> Result<Self> {
        let mut builder = KnowledgeBaseBuilder::new();
        for actor in raw.actors {
            builder.add_actor(actor);
        }
        for generator in raw.universe {
            builder.add_generator(generator);
        }
        let universe = builder.universe.clone();
        for (actor, sigma) in raw.sigma {
            if !builder.sigma.contains_key(&actor) {
                return Err(Error::UnknownActor(actor));
            }
            for (generator, weight) in sigma {
                if !universe.contains(&generator) {
                    return Err(Error::GeneratorNotInUniverse { actor, generator });
                }
                builder.insert(actor.clone(), generator, weight)?;
            }
        }
        Ok(builder.build())
    }
}

/// Incremental construction of a [`KnowledgeBase`].
///
/// Inserting the same `(actor, generator)` pair twice keeps the larger weight.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeBaseBuilder {
    universe: BTreeSet<GeneratorId>,
    sigma: BTreeMap<ActorId, Sigma>,
}

impl KnowledgeBaseBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares an actor, possibly with an empty generator set.
    pub fn add_actor(&mut self, actor: ActorId) -> &mut Self {
        self.sigma.entry(actor).or_default();
        self
    }

    /// Declares a universe member that no actor needs to hold.
    pub fn add_generator(&mut self, generator: GeneratorId) -> &mut Self {
        self.universe.insert(generator);
        self
    }

    pub fn insert(&mut self, actor: ActorId, generator: GeneratorId, weight: f64) -> Result<&mut Self> {
        check_weight(&actor, &generator, weight)?;
        self.universe.insert(generator.clone());
        let slot = self
            .sigma
            .entry(actor)
            .or_default()
            .entry(generator)
            .or_insert(weight);
        if weight > *slot {
            *slot = weight;
        }
        Ok(self)
    }

    pub fn build(self) -> KnowledgeBase {
        KnowledgeBase {
            actors: self.sigma.keys().cloned().collect(),
            universe: self.universe.into_iter().collect(),
            sigma: self.sigma,
        }
    }
}

impl KnowledgeBase {
    pub fn builder() -> KnowledgeBaseBuilder {
        KnowledgeBaseBuilder::new()
    }

    /// Builds a knowledge base where every held generator has weight 1.
    ///
    /// ```
    /// use knowshare::KnowledgeBase;
    ///
    /// let kb = KnowledgeBase::from_sets([("a", vec!["g1", "g2"]), ("b", vec![])]).unwrap();
    /// assert_eq!(kb.actors().len(), 2);
    /// assert_eq!(kb.universe().len(), 2);
    /// ```
    pub fn from_sets<A, G, S, I>(sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, S)>,
        S: IntoIterator<Item = G>,
        A: AsRef<str>,
        G: AsRef<str>,
    {
        Self::from_weighted_sets(
            sets.into_iter()
                .map(|(actor, gens)| (actor, gens.into_iter().map(|g| (g, 1.0)))),
        )
    }

    pub fn from_weighted_sets<A, G, S, I>(sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, S)>,
        S: IntoIterator<Item = (G, f64)>,
        A: AsRef<str>,
        G: AsRef<str>,
    {
        let mut builder = KnowledgeBaseBuilder::new();
        for (actor, gens) in sets {
            let actor = ActorId::new(actor.as_ref())?;
            builder.add_actor(actor.clone());
            for (generator, weight) in gens {
                builder.insert(actor.clone(), GeneratorId::new(generator.as_ref())?, weight)?;
            }
        }
        Ok(builder.build())
    }

    pub fn actors(&self) -> &[ActorId] {
        &self.actors
    }

    pub fn universe(&self) -> &[GeneratorId] {
        &self.universe
    }

    pub fn is_empty(&self) -> bool {
        self.actors.is_empty()
    }

    pub fn contains_actor(&self, actor: &ActorId) -> bool {
        self.sigma.contains_key(actor)
    }

    /// The generator set of `actor` with its weights.
    pub fn sigma(&self, actor: &ActorId) -> Result<&Sigma> {
        self.sigma
            .get(actor)
            .ok_or_else(|| Error::UnknownActor(actor.clone()))
    }

    /// `(actor, Σ)` pairs in actor order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&ActorId, &Sigma)> {
        self.sigma.iter()
    }

    /// Every stored `(actor, generator, weight)` triple, ordered by actor then
    /// generator.
    pub fn incidences(&self) -> impl Iterator<Item = (&ActorId, &GeneratorId, f64)> {
        self.sigma
            .iter()
            .flat_map(|(a, s)| s.iter().map(move |(g, w)| (a, g, *w)))
    }

    /// `f(σ)` for one actor: the stored weight, or 0 when the generator is not held.
    pub fn f_single(&self, actor: &ActorId, generator: &GeneratorId) -> Result<f64> {
        Ok(self.sigma(actor)?.get(generator).copied().unwrap_or(0.0))
    }

    /// Joint disseminator value `f(σ_1, …, σ_m)`, the minimum of the member
    /// values.
    ///
    /// The min rule is idempotent, symmetric, associative, bounded by every
    /// member value, and is zero as soon as one member is absent.
    pub fn f_joint<'a, I>(&self, actor: &ActorId, generators: I) -> Result<f64>
    where
        I: IntoIterator<Item = &'a GeneratorId>,
    {
        let sigma = self.sigma(actor)?;
        generators
            .into_iter()
            .map(|g| sigma.get(g).copied().unwrap_or(0.0))
            .reduce(f64::min)
            .ok_or(Error::EmptyGeneratorSet)
    }

    /// `|Σ|`, the number of generators the actor holds.
    pub fn sigma_size(&self, actor: &ActorId) -> Result<usize> {
        Ok(self.sigma(actor)?.len())
    }

    /// `L(σ) = f(σ) / |Σ|`.
    ///
    /// This only sums to 1 over `Σ` when every weight is 1; see
    /// [`mass_distribution`](Self::mass_distribution) for a normalized variant.
    pub fn mass_probability(&self, actor: &ActorId, generator: &GeneratorId) -> Result<f64> {
        let sigma = self.non_empty_sigma(actor)?;
        let weight = sigma.get(generator).copied().unwrap_or(0.0);
        Ok(weight / sigma.len() as f64)
    }

    /// `L` over every held generator. With `normalized`, values are rescaled
    /// by the weight sum so they add up to 1.
    pub fn mass_distribution(&self, actor: &ActorId, normalized: bool) -> Result<BTreeMap<GeneratorId, f64>> {
        let sigma = self.non_empty_sigma(actor)?;
        let denominator = if normalized {
            sigma.values().sum::<f64>()
        } else {
            sigma.len() as f64
        };
        Ok(sigma
            .iter()
            .map(|(g, w)| (g.clone(), w / denominator))
            .collect())
    }

    fn non_empty_sigma(&self, actor: &ActorId) -> Result<&Sigma> {
        let sigma = self.sigma(actor)?;
        if sigma.is_empty() {
            return Err(Error::EmptyKnowledgeBase(actor.clone()));
        }
        Ok(sigma)
    }
}

/// A finite set of situations `M` and which generators each one satisfies.
///
/// Unlisted `(situation, generator)` pairs do not satisfy.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SituationUniverse {
    situations: Vec<SituationId>,
    satisfies: BTreeMap<SituationId, BTreeSet<GeneratorId>>,
}

impl SituationUniverse {
    /// Situations are kept in the given order; duplicates are dropped.
    pub fn new(situations: impl IntoIterator<Item = SituationId>) -> Self {
        let mut seen = BTreeSet::new();
        let situations: Vec<SituationId> = situations
            .into_iter()
            .filter(|s| seen.insert(s.clone()))
            .collect();
        let satisfies = situations
            .iter()
            .map(|s| (s.clone(), BTreeSet::new()))
            .collect();
        Self {
            situations,
            satisfies,
        }
    }

    pub fn situations(&self) -> &[SituationId] {
        &self.situations
    }

    /// Marks `situation` as consistent with `generator`. Unknown situations
    /// are appended.
    pub fn satisfy(&mut self, situation: SituationId, generator: GeneratorId) -> &mut Self {
        if !self.satisfies.contains_key(&situation) {
            self.situations.push(situation.clone());
        }
        self.satisfies.entry(situation).or_default().insert(generator);
        self
    }

    pub fn satisfies(&self, situation: &SituationId, generator: &GeneratorId) -> bool {
        self.satisfies
            .get(situation)
            .is_some_and(|gens| gens.contains(generator))
    }

    /// `mod(Σ)`: the situations satisfying every generator of `sigma`, in
    /// universe order. An empty `sigma` admits every situation.
    pub fn mod_of<'a, I>(&self, sigma: I) -> Vec<SituationId>
    where
        I: IntoIterator<Item = &'a GeneratorId>,
        I::IntoIter: Clone,
    {
        let sigma = sigma.into_iter();
        self.situations
            .iter()
            .filter(|m| sigma.clone().all(|g| self.satisfies(m, g)))
            .cloned()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(s: &str) -> ActorId {
        ActorId::new(s).unwrap()
    }
    fn g(s: &str) -> GeneratorId {
        GeneratorId::new(s).unwrap()
    }
    fn m(s: &str) -> SituationId {
        SituationId::new(s).unwrap()
    }

    fn weighted(pairs: &[(&str, f64)]) -> KnowledgeBase {
        KnowledgeBase::from_weighted_sets([("a1", pairs.iter().copied())]).unwrap()
    }

    #[test]
    fn f_single_reads_stored_weight_or_zero() {
        let kb = weighted(&[("g1", 1.0)]);
        assert_eq!(kb.f_single(&a("a1"), &g("g1")).unwrap(), 1.0);
        assert_eq!(kb.f_single(&a("a1"), &g("g2")).unwrap(), 0.0);
        let kb = weighted(&[("g1", 0.8), ("g2", 0.5)]);
        assert_eq!(kb.f_single(&a("a1"), &g("g2")).unwrap(), 0.5);
        let err = kb.f_single(&a("zz"), &g("g1")).unwrap_err();
        assert!(err.to_string().contains("unknown actor id"));
    }

    #[test]
    fn f_joint_min_rule() {
        let kb = weighted(&[("g1", 0.8), ("g2", 0.5)]);
        assert_eq!(kb.f_joint(&a("a1"), &[g("g1"), g("g2")]).unwrap(), 0.5);
        assert_eq!(kb.f_joint(&a("a1"), &[g("g1"), g("g1")]).unwrap(), 0.8);
        assert_eq!(kb.f_joint(&a("a1"), &[g("g1"), g("g9")]).unwrap(), 0.0);
        let err = kb.f_joint(&a("a1"), &[]).unwrap_err();
        assert_eq!(err.to_string(), "empty generator set");
        assert!(matches!(
            kb.f_joint(&a("x"), &[g("g1")]),
            Err(Error::UnknownActor(_))
        ));
    }

    #[test]
    fn sigma_size_counts_generators() {
        let kb = KnowledgeBase::from_sets([("e", vec![]), ("t", vec!["g1", "g2", "g3"])]).unwrap();
        assert_eq!(kb.sigma_size(&a("e")).unwrap(), 0);
        assert_eq!(kb.sigma_size(&a("t")).unwrap(), 3);
        assert_eq!(weighted(&[("g1", 0.2)]).sigma_size(&a("a1")).unwrap(), 1);
        assert!(kb.sigma_size(&a("nope")).is_err());
    }

    #[test]
    fn mass_probability_literal_formula() {
        let kb = KnowledgeBase::from_sets([("a1", ["g1", "g2", "g3", "g4"])]).unwrap();
        for gen in ["g1", "g2", "g3", "g4"] {
            assert_eq!(kb.mass_probability(&a("a1"), &g(gen)).unwrap(), 0.25);
        }
        let kb = weighted(&[("g1", 1.0), ("g2", 0.5)]);
        assert_eq!(kb.mass_probability(&a("a1"), &g("g2")).unwrap(), 0.25);
        let kb = weighted(&[("g1", 1.0)]);
        assert_eq!(kb.mass_probability(&a("a1"), &g("g9")).unwrap(), 0.0);

        let empty = KnowledgeBase::from_sets([("e", Vec::<&str>::new())]).unwrap();
        let err = empty.mass_probability(&a("e"), &g("g1")).unwrap_err();
        assert!(err.to_string().starts_with("empty knowledge base for actor"));
    }

    #[test]
    fn mass_distribution_both_variants() {
        let kb = weighted(&[("g1", 1.0), ("g2", 1.0)]);
        let d = kb.mass_distribution(&a("a1"), false).unwrap();
        assert_eq!(d[&g("g1")], 0.5);
        assert_eq!(d[&g("g2")], 0.5);

        let kb = weighted(&[("g1", 1.0), ("g2", 0.5)]);
        let d = kb.mass_distribution(&a("a1"), true).unwrap();
        assert!((d[&g("g1")] - 2.0 / 3.0).abs() < 1e-12);
        assert!((d[&g("g2")] - 1.0 / 3.0).abs() < 1e-12);

        let kb = weighted(&[("g1", 0.5)]);
        assert_eq!(kb.mass_distribution(&a("a1"), false).unwrap()[&g("g1")], 0.5);

        let empty = KnowledgeBase::from_sets([("e", Vec::<&str>::new())]).unwrap();
        assert!(empty.mass_distribution(&a("e"), true).is_err());
    }

    #[test]
    fn weights_outside_unit_interval_rejected() {
        for w in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(KnowledgeBase::from_weighted_sets([("a", [("g", w)])]).is_err(), "{w}");
        }
    }

    #[test]
    fn duplicate_insert_keeps_max() {
        let mut b = KnowledgeBase::builder();
        b.insert(a("a1"), g("g1"), 0.5).unwrap();
        b.insert(a("a1"), g("g1"), 0.8).unwrap();
        b.insert(a("a1"), g("g1"), 0.3).unwrap();
        assert_eq!(b.build().f_single(&a("a1"), &g("g1")).unwrap(), 0.8);
    }

    #[test]
    fn actors_sorted_and_universe_closed() {
        let kb = KnowledgeBase::from_sets([("b", ["g2"]), ("a", ["g1"])]).unwrap();
        assert_eq!(kb.actors(), &[a("a"), a("b")]);
        assert_eq!(kb.universe(), &[g("g1"), g("g2")]);
    }

    #[test]
    fn json_rejects_generator_outside_universe() {
        let json = r#"{"actors":["a"],"universe":["g1"],"sigma":{"a":{"g2":1.0}}}"#;
        assert!(serde_json::from_str::<KnowledgeBase>(json).is_err());
        let json = r#"{"actors":["a"],"universe":["g1"],"sigma":{"a":{"g1":0.0}}}"#;
        assert!(serde_json::from_str::<KnowledgeBase>(json).is_err());
        let json = r#"{"actors":["a","b"],"universe":["g1"],"sigma":{"a":{"g1":1.0}}}"#;
        let kb: KnowledgeBase = serde_json::from_str(json).unwrap();
        assert_eq!(kb.sigma_size(&a("b")).unwrap(), 0);
    }

    #[test]
    fn mod_of_filters_by_conjunction() {
        let mut u = SituationUniverse::new([m("m1"), m("m2"), m("m3")]);
        u.satisfy(m("m1"), g("g1"))
            .satisfy(m("m2"), g("g1"))
            .satisfy(m("m1"), g("g2"));
        assert_eq!(u.mod_of(&[g("g1")]), vec![m("m1"), m("m2")]);
        assert_eq!(u.mod_of(&[g("g1"), g("g2")]), vec![m("m1")]);
        assert_eq!(u.mod_of(&[]), vec![m("m1"), m("m2"), m("m3")]);
    }
}
