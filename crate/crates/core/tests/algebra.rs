mod common;

use common::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use wfst::fst::{enumerate_relation, Relation};
use wfst::ops::{closure, concat, project, reverse, union, ProjectSide};
use wfst::{Semiring, Weight};

const T: Semiring = Semiring::Tropical;
const R: Semiring = Semiring::Real;
const B: Semiring = Semiring::Boolean;

fn tropical() -> impl Strategy<Value = Weight> {
    prop_oneof![
        9 => (-40i32..40).prop_map(|v| Weight(v as f64 / 4.0)),
        1 => Just(Weight::INFINITY),
    ]
}

fn real() -> impl Strategy<Value = Weight> {
    (0.0f64..8.0).prop_map(Weight)
}

fn boolean() -> impl Strategy<Value = Weight> {
    any::<bool>().prop_map(|b| Weight(if b { 1.0 } else { 0.0 }))
}

fn close(kind: Semiring, a: Weight, b: Weight) -> bool {
    match kind {
        Semiring::Real => (a.0 - b.0).abs() <= 1e-12 * a.0.abs().max(b.0.abs()).max(1.0),
        _ => a == b,
    }
}

fn laws(kind: Semiring, a: Weight, b: Weight, c: Weight) -> Result<(), TestCaseError> {
    let (p, t) = (|x, y| kind.plus(x, y), |x, y| kind.times(x, y));
    prop_assert!(close(kind, p(p(a, b), c), p(a, p(b, c))));
    prop_assert!(close(kind, t(t(a, b), c), t(a, t(b, c))));
    prop_assert!(close(kind, t(a, p(b, c)), p(t(a, b), t(a, c))));
    prop_assert!(close(kind, t(p(a, b), c), p(t(a, c), t(b, c))));
    prop_assert_eq!(p(a, b), p(b, a));
    prop_assert_eq!(p(a, kind.zero()), a);
    prop_assert_eq!(t(a, kind.one()), a);
    prop_assert_eq!(t(kind.one(), a), a);
    prop_assert!(kind.is_zero(t(a, kind.zero())));
    Ok(())
}

proptest! {
    #[test]
    fn tropical_laws(a in tropical(), b in tropical(), c in tropical()) {
        laws(T, a, b, c)?;
    }

    #[test]
    fn real_laws(a in real(), b in real(), c in real()) {
        laws(R, a, b, c)?;
    }

    #[test]
    fn boolean_laws(a in boolean(), b in boolean(), c in boolean()) {
        laws(B, a, b, c)?;
    }

    #[test]
    fn division_undoes_times(a in tropical(), b in (-40i32..40).prop_map(|v| Weight(v as f64))) {
        prop_assert_eq!(T.divide(T.times(b, a), b).unwrap(), a);
    }
}

fn merge(kind: Semiring, a: &Relation, b: &Relation) -> Relation {
    let mut out = a.clone();
    for (k, w) in b {
        let e = out.entry(k.clone()).or_insert(kind.zero());
        *e = kind.plus(*e, *w);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn union_adds_relations(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_fst(&mut rng, T, 3, 2, 5, true, false);
        let b = random_fst(&mut rng, T, 3, 2, 5, true, false);
        let got = enumerate_relation(&union(&a, &b).unwrap(), 4, 4).unwrap();
        let want = merge(T, &enumerate_relation(&a, 4, 4).unwrap(), &enumerate_relation(&b, 4, 4).unwrap());
        prop_assert_eq!(got, want);
    }

    #[test]
    fn concat_splits_every_string(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let a = random_fst(&mut rng, T, 3, 2, 4, false, true);
        let b = random_fst(&mut rng, T, 3, 2, 4, false, true);
        let (ra, rb) = (enumerate_relation(&a, 4, 4).unwrap(), enumerate_relation(&b, 4, 4).unwrap());
        let mut want = Relation::new();
        for ((u, _), x) in &ra {
            for ((v, _), y) in &rb {
                if u.len() + v.len() <= 4 {
                    let s = [u.as_slice(), v.as_slice()].concat();
                    let e = want.entry((s.clone(), s)).or_insert(T.zero());
                    *e = T.plus(*e, T.times(*x, *y));
                }
            }
        }
        let got = enumerate_relation(&concat(&a, &b).unwrap(), 4, 4).unwrap();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn reverse_twice_is_identity(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random_fst(&mut rng, T, 4, 2, 6, true, false);
        let got = enumerate_relation(&reverse(&reverse(&f)), 4, 4).unwrap();
        prop_assert_eq!(got, enumerate_relation(&f, 4, 4).unwrap());
    }

    #[test]
    fn input_projection_keeps_best_weight(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random_fst(&mut rng, T, 3, 2, 5, true, false);
        let p = project(&f, ProjectSide::Input);
        let mut want = Relation::new();
        for ((u, _), w) in enumerate_relation(&f, 3, 12).unwrap() {
            let e = want.entry((u.clone(), u)).or_insert(T.zero());
            *e = T.plus(*e, w);
        }
        prop_assert_eq!(enumerate_relation(&p, 3, 3).unwrap(), want);
    }
}

#[test]
fn closure_accepts_repetitions() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..40 {
        let a = random_fst(&mut rng, T, 2, 2, 3, false, true);
        let ra = enumerate_relation(&a, 3, 3).unwrap();
        let star = enumerate_relation(&closure(&a).unwrap(), 3, 3).unwrap();
        assert_eq!(star.get(&(vec![], vec![])), Some(&T.one()));
        for (k, w) in &ra {
            let got = star[k];
            assert!(got.0 <= w.0, "closure lost {k:?}: {got} > {w}");
        }
    }
}
