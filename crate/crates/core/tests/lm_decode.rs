mod common;

use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wfst::decode::{best_path, lattice_prune, shortest_distance, ShortestPathAlgo};
use wfst::fst::{enumerate_relation, weight_of};
use wfst::ngram::{
    count_ngrams, katz_model, katz_model_with, BackoffModel, CountOptions, Degeneracy, KatzOptions, DEFAULT_K_THRESHOLD,
};
use wfst::{Error, Semiring};

const T: Semiring = Semiring::Tropical;

const CORPUS: &str = "the cat sat on the mat\n\
                      the dog sat on the log\n\
                      a cat ran\n\
                      the dog ran to the cat\n\
                      a bird sang\n\
                      the cat saw a dog\n\
                      the bird saw the cat\n\
                      a dog sat\n";

/// Every history here continues with a word seen once elsewhere, so nothing
/// is left for back-off below `<s> a`.
const TIGHT: &str = "the cat sat on the mat\n\
                     the dog sat on the log\n\
                     a cat saw the dog\n\
                     the dog saw a bird\n\
                     a bird sat on a cat\n";

fn model(order: usize) -> BackoffModel {
    let counts = count_ngrams(
        CORPUS,
        CountOptions {
            order,
            boundaries: true,
        },
    )
    .unwrap();
    katz_model(&counts, DEFAULT_K_THRESHOLD).unwrap()
}

fn assert_normalized(m: &BackoffModel) {
    let vocab = m.vocabulary();
    for h in m.histories() {
        let total: f64 = vocab.iter().map(|&y| m.prob(y, &h)).sum();
        assert!(
            (total - 1.0).abs() <= 1e-9,
            "order {}, history {h:?}: {total}",
            m.order()
        );
    }
}

#[test]
fn every_history_is_a_distribution() {
    for order in 1..=3 {
        assert_normalized(&model(order));
    }
}

#[test]
fn degenerate_back_off_is_reported_or_renormalized() {
    let counts = count_ngrams(TIGHT, CountOptions::new(3)).unwrap();
    match katz_model(&counts, DEFAULT_K_THRESHOLD) {
        Err(Error::Degenerate { context, .. }) => assert_eq!(context, "<s> a"),
        other => panic!("expected a degeneracy error, got {other:?}"),
    }
    let opts = KatzOptions {
        k_threshold: DEFAULT_K_THRESHOLD,
        degeneracy: Degeneracy::Renormalize,
    };
    assert_normalized(&katz_model_with(&counts, opts).unwrap());
}

#[test]
fn arpa_round_trip_keeps_scores() {
    let m = model(3);
    let back = BackoffModel::read_arpa(&m.write_arpa()).unwrap();
    for line in CORPUS.lines().chain(["the bird sat on the dog"]) {
        let words: Vec<&str> = line.split_whitespace().collect();
        let (x, y) = (m.cost_of_words(&words), back.cost_of_words(&words));
        assert!((x - y).abs() <= 1e-4, "{line}: {x} vs {y}");
    }
}

#[test]
fn seen_sentences_are_cheaper_than_scrambled_ones() {
    let m = model(2);
    let seen = m.cost_of_words(&["the", "cat", "sat", "on", "the", "mat"]);
    let scrambled = m.cost_of_words(&["mat", "the", "on", "sat", "cat", "the"]);
    assert!(seen < scrambled);
}

#[test]
fn best_path_agrees_with_distances() {
    let mut rng = StdRng::seed_from_u64(41);
    for trial in 0..100 {
        let n = rng.gen_range(2..=7);
        let g = random_dag(&mut rng, T, n, 2, 2 * n, true);
        let d = shortest_distance(&g, ShortestPathAlgo::Dijkstra).unwrap();
        let want = g
            .states()
            .map(|q| d[q].0 + g.final_weight(q).0)
            .fold(f64::INFINITY, f64::min);
        match best_path(&g) {
            Ok(p) => {
                assert_eq!(p.weight.0, want, "trial {trial}");
                assert_eq!(
                    weight_of(&g, &p.input, Some(&p.output)).unwrap().0,
                    want,
                    "trial {trial}"
                );
            }
            Err(_) => assert!(want.is_infinite(), "trial {trial}: no path but distance {want}"),
        }
    }
}

#[test]
fn pruning_keeps_paths_within_threshold() {
    let mut rng = StdRng::seed_from_u64(42);
    for trial in 0..100 {
        let n = rng.gen_range(2..=6);
        let g = random_dag(&mut rng, T, n, 2, 2 * n, false);
        let rel = enumerate_relation(&g, n, n).unwrap();
        let Some(best) = rel.values().map(|w| w.0).reduce(f64::min) else {
            continue;
        };
        let threshold = rng.gen_range(0..4) as f64;
        let p = lattice_prune(&g, threshold).unwrap();
        let pruned = enumerate_relation(&p, n, n).unwrap();
        for (k, w) in &rel {
            if w.0 <= best + threshold {
                assert_eq!(pruned.get(k), Some(w), "trial {trial}: lost {k:?}");
            }
        }
        // Surviving arcs may recombine into costlier paths, but never cheaper ones.
        for (k, w) in &pruned {
            assert!(w.0 >= rel[k].0, "trial {trial}: {k:?} improved to {w}");
        }
        assert_eq!(best_path(&p).unwrap().weight.0, best, "trial {trial}");
        assert!(
            path_distances(&p).iter().all(|d| d.is_finite()),
            "trial {trial}: unreachable state kept"
        );
    }
}
