//! Fixtures shared by the benchmarks.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wfst::{Arc, Fst, Label, Semiring, Weight, EPSILON};

/// Random tropical transducer over `1..=sigma` with roughly `fanout` arcs per
/// state and a sprinkling of ε arcs. Every state gets at least one arc to its
/// successor so the machine stays connected.
pub fn random_machine(seed: u64, states: usize, sigma: Label, fanout: usize) -> Fst {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut f = Fst::new(Semiring::Tropical);
    f.add_states(states);
    f.set_start(0);
    for q in 0..states {
        let next = (q + 1) % states;
        let l = rng.gen_range(1..=sigma);
        f.add_arc(q, Arc::new(l, l, Weight(rng.gen_range(0..4) as f64), next));
        for _ in 1..fanout {
            let eps = rng.gen_bool(0.1);
            let i = if eps { EPSILON } else { rng.gen_range(1..=sigma) };
            let o = rng.gen_range(0..=sigma);
            f.add_arc(
                q,
                Arc::new(i, o, Weight(rng.gen_range(0..8) as f64), rng.gen_range(0..states)),
            );
        }
        if rng.gen_bool(0.2) {
            f.set_final(q, Weight(rng.gen_range(0..3) as f64));
        }
    }
    f.set_final(states - 1, Weight(0.0));
    f
}

/// Random acyclic acceptor: every arc moves forward, so it always
/// determinizes.
pub fn random_dag_acceptor(seed: u64, states: usize, sigma: Label, fanout: usize) -> Fst {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut f = Fst::new(Semiring::Tropical);
    f.add_states(states);
    f.set_start(0);
    for q in 0..states - 1 {
        for _ in 0..fanout {
            let l = rng.gen_range(1..=sigma);
            let to = rng.gen_range(q + 1..states);
            f.add_arc(q, Arc::acceptor(l, Weight(rng.gen_range(0..6) as f64), to));
        }
    }
    f.set_final(states - 1, Weight(0.0));
    f
}

/// Observation chain plus a lexicon and a grammar for beam-search runs.
pub fn toy_cascade(seed: u64, frames: usize) -> (Fst, Vec<Fst>) {
    let mut rng = StdRng::seed_from_u64(seed);
    let obs: Vec<Label> = (0..frames).map(|_| rng.gen_range(1..=4)).collect();
    let mut lex = random_machine(seed ^ 1, 12, 4, 3);
    for l in 1..=4 {
        lex.add_arc(0, Arc::new(l, l + 4, Weight(5.0), 0));
    }
    lex.set_final(0, Weight(0.0));
    let mut grammar = Fst::sigma_star(Semiring::Tropical, &(1..=8).collect::<Vec<_>>());
    for q in grammar.states() {
        for a in grammar.arcs_mut(q) {
            a.weight = Weight(rng.gen_range(0..3) as f64);
        }
    }
    (Fst::linear(Semiring::Tropical, &obs), vec![lex, grammar])
}

pub const VOICING_RULES: &str = "Alphabet = [m i s z o $ # b]\n\
                                 Class VStop = [b m]\n\
                                 s -> z / _ ($|#)VStop ;\n";

/// A small training corpus with enough singletons for Katz back-off.
pub fn corpus(sentences: usize, seed: u64) -> String {
    const WORDS: [&str; 12] = [
        "the", "a", "cat", "dog", "bird", "sat", "ran", "saw", "on", "mat", "log", "to",
    ];
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = String::new();
    for _ in 0..sentences {
        let len = rng.gen_range(2..=8);
        let words: Vec<&str> = (0..len).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect();
        out.push_str(&words.join(" "));
        out.push('\n');
    }
    out
}
