mod common;

use common::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wfst::fst::{connect, enumerate_relation, expand, write_text, StateMachine};
use wfst::lazy::{CacheDiscipline, Cached, LazyCompose};
use wfst::ops::{compose, intersect};
use wfst::Semiring;

const T: Semiring = Semiring::Tropical;

#[test]
fn composition_matches_the_join_oracle() {
    let mut rng = StdRng::seed_from_u64(31);
    for trial in 0..80 {
        let (n, m) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
        let a = random_input_bounded(&mut rng, T, n, 2, 5);
        let b = random_fst(&mut rng, T, m, 2, 5, true, false);
        let got = enumerate_relation(&compose(&a, &b).unwrap(), 5, 5).unwrap();
        assert_eq!(got, compose_oracle(&a, &b, 5), "trial {trial}");
    }
}

#[test]
fn real_composition_counts_each_path_once() {
    let mut rng = StdRng::seed_from_u64(32);
    for trial in 0..80 {
        let a = random_dag(&mut rng, Semiring::Real, 4, 2, 5, true);
        let b = random_dag(&mut rng, Semiring::Real, 4, 2, 5, true);
        let got = enumerate_relation(&compose(&a, &b).unwrap(), 6, 6).unwrap();
        let want = compose_oracle(&a, &b, 6);
        assert_eq!(got.len(), want.len(), "trial {trial}");
        for (k, w) in &want {
            assert!((got[k].0 - w.0).abs() <= 1e-9, "trial {trial}: {k:?}");
        }
    }
}

#[test]
fn intersection_is_symmetric_on_acceptors() {
    let mut rng = StdRng::seed_from_u64(33);
    for trial in 0..60 {
        let a = random_fst(&mut rng, T, 3, 2, 5, false, true);
        let b = random_fst(&mut rng, T, 3, 2, 5, false, true);
        let ab = enumerate_relation(&intersect(&a, &b).unwrap(), 5, 5).unwrap();
        let ba = enumerate_relation(&intersect(&b, &a).unwrap(), 5, 5).unwrap();
        assert_eq!(ab, ba, "trial {trial}");
    }
}

#[test]
fn lazy_expansion_is_the_static_result() {
    let mut rng = StdRng::seed_from_u64(34);
    for trial in 0..80 {
        let a = random_fst(&mut rng, T, 4, 2, 6, true, false);
        let b = random_fst(&mut rng, T, 4, 2, 6, true, false);
        let want = write_text(&connect(&compose(&a, &b).unwrap()));
        let mut lazy = LazyCompose::new(&a, &b).unwrap();
        assert_eq!(write_text(&connect(&expand(&mut lazy))), want, "trial {trial}");
        for d in [
            CacheDiscipline::Memoize,
            CacheDiscipline::Lru(2),
            CacheDiscipline::RefCount,
        ] {
            let mut cached = Cached::new(LazyCompose::new(&a, &b).unwrap(), d).unwrap();
            assert_eq!(write_text(&connect(&expand(&mut cached))), want, "trial {trial}, {d:?}");
        }
    }
}

#[test]
fn lazy_composition_expands_only_what_is_asked() {
    let a = wfst::Fst::linear(T, &[1, 1, 1]);
    let b = wfst::Fst::sigma_star(T, &[1, 2]);
    let mut lazy = LazyCompose::new(&a, &b).unwrap();
    let s = lazy.start().unwrap();
    let _ = lazy.arcs(s);
    assert_eq!(lazy.expanded(), 1);
}
