mod common;

use std::collections::BTreeSet;

use common::*;
use knowshare::{brute_force_matrix, overlap_matrix, pairwise_overlap, InvertedIndex, OverlapMode};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn intersect(a: &BTreeSet<knowshare::GeneratorId>, b: &BTreeSet<knowshare::GeneratorId>) -> BTreeSet<knowshare::GeneratorId> {
    a & b
}

proptest! {
    #[test]
    fn count_mode_set_laws(kb in arb_kb()) {
        let m = overlap_matrix(&kb, OverlapMode::Count);
        let sets: Vec<_> = kb.actors().iter().map(|a| generator_set(&kb, a)).collect();
        for (i, a) in kb.actors().iter().enumerate() {
            prop_assert_eq!(m.get(a, a).unwrap(), sets[i].len() as f64);
            for (j, b) in kb.actors().iter().enumerate() {
                let ab = m.get(a, b).unwrap();
                prop_assert_eq!(ab, m.get(b, a).unwrap());
                prop_assert_eq!(ab, intersect(&sets[i], &sets[j]).len() as f64);
                prop_assert!(ab <= sets[i].len().min(sets[j].len()) as f64);
                for c in &sets {
                    let left = intersect(&sets[i], &intersect(&sets[j], c));
                    prop_assert_eq!(left.len(), intersect(&intersect(&sets[i], &sets[j]), c).len());
                    prop_assert_eq!(
                        left.len(),
                        intersect(&intersect(&sets[i], &sets[j]), &intersect(&sets[i], c)).len()
                    );
                }
            }
        }
    }

    #[test]
    fn index_matches_oracle_in_both_modes(kb in arb_kb()) {
        for mode in [OverlapMode::Count, OverlapMode::WeightedMin] {
            let fast = overlap_matrix(&kb, mode);
            let slow = brute_force_matrix(&kb, mode).unwrap();
            prop_assert_eq!(fast.nnz(), slow.nnz());
            for ((a1, b1, v1), (a2, b2, v2)) in fast.entries().zip(slow.entries()) {
                prop_assert_eq!((a1, b1), (a2, b2));
                prop_assert!((v1 - v2).abs() < 1e-9);
                prop_assert!(v1 > 0.0);
                prop_assert!(a1 < b1);
                prop_assert!((v1 - pairwise_overlap(&kb, a1, b1, mode).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn index_reconstructs_kb(kb in arb_kb()) {
        let index = InvertedIndex::build(&kb);
        for g in index.generators() {
            let ids: Vec<_> = index.postings(g).unwrap().map(|(a, _)| a.clone()).collect();
            let mut sorted = ids.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(&ids, &sorted);
        }
        prop_assert_eq!(index.to_knowledge_base(), kb);
    }
}

#[test]
fn count_entries_are_integral_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kb = random_kb(&mut rng, 150, 40, 12, true);
    let m = overlap_matrix(&kb, OverlapMode::Count);
    for (a, b, v) in m.entries() {
        assert_eq!(v.fract(), 0.0);
        let bound = kb.sigma_size(a).unwrap().min(kb.sigma_size(b).unwrap());
        assert!(v as usize <= bound);
    }
}

#[test]
fn result_independent_of_thread_count() {
    let kb = zipf_kb(11, 3000, 12, 400, 0.7);
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    for mode in [OverlapMode::Count, OverlapMode::WeightedMin] {
        let one = pool(1).install(|| overlap_matrix(&kb, mode));
        let four = pool(4).install(|| overlap_matrix(&kb, mode));
        assert_eq!(one, four);
    }
}

#[test]
fn oracle_matches_on_random_fifty_actor_instance() {
    // 50 actors, 10 generators each, 40-generator universe.
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let names: Vec<String> = (0..40).map(generator_name).collect();
    let kb = knowshare::KnowledgeBase::from_sets((0..50).map(|a| {
        let gens: Vec<&str> = rand::seq::index::sample(&mut rng, 40, 10)
            .into_iter()
            .map(|g| names[g].as_str())
            .collect();
        (actor_name(a), gens)
    }))
    .unwrap();
    let fast = overlap_matrix(&kb, OverlapMode::Count);
    assert_eq!(fast, brute_force_matrix(&kb, OverlapMode::Count).unwrap());
    assert!(fast.nnz() > 0);
}
