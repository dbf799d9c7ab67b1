use std::collections::BTreeMap;

use super::counts::{BOS, EOS};
use super::model::BackoffModel;
use crate::fst::{Arc, Fst, Label, StateId, EPSILON};
use crate::semiring::{Semiring, Weight};

fn cost(p: f64) -> Weight {
    Weight(-p.ln())
}

/// Tropical acceptor of a back-off model.
///
/// Each history with seen continuations is a state. A seen word `y` leaves
/// `h` with cost `-ln P*(y|h)` towards the longest suffix of `h y` that is a
/// state; an ε arc with cost `-ln α(h)` leads to the next shorter history.
/// With sentence boundaries the start state is `<s>` and `</s>` becomes a
/// final weight; otherwise the start is the empty history and every state
/// is final with weight zero.
///
/// A back-off path can undercut the explicit one, so the best path scores
/// a sentence at most at its model cost.
pub fn build_lm_fsa(m: &BackoffModel) -> Fst {
    let t = Semiring::Tropical;
    let histories = m.histories();
    let ids: BTreeMap<&[Label], StateId> = histories.iter().enumerate().map(|(i, h)| (h.as_slice(), i)).collect();
    let state_of = |g: &[Label]| -> StateId {
        let keep = g.len().min(m.order() - 1);
        let mut s = &g[g.len() - keep..];
        loop {
            if let Some(&id) = ids.get(s) {
                return id;
            }
            s = &s[1..];
        }
    };
    let bos = m.symbols.find_label(BOS);
    let eos = m.symbols.find_label(EOS).filter(|_| bos.is_some());

    let mut f = Fst::new(t);
    f.add_states(histories.len());
    f.set_start(match bos {
        Some(b) => state_of(&[b]),
        None => 0,
    });
    for (q, h) in histories.iter().enumerate() {
        if eos.is_none() {
            f.set_final(q, t.one());
        }
        for (g, &p) in m.probs.range(h.clone()..) {
            if !g.starts_with(h) {
                break;
            }
            if g.len() != h.len() + 1 {
                continue;
            }
            let y = g[h.len()];
            if Some(y) == eos {
                f.set_final(q, cost(p));
            } else {
                f.add_arc(q, Arc::acceptor(y, cost(p), state_of(g)));
            }
        }
        if !h.is_empty() {
            let a = m.alpha(h);
            if a > 0.0 {
                f.add_arc(q, Arc::acceptor(EPSILON, cost(a), state_of(&h[1..])));
            }
        }
    }
    let table = std::sync::Arc::new(m.symbols.clone());
    f.set_symbols(Some(table));
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decode::best_path;
    use crate::fst::weight_of;
    use crate::ngram::{count_ngrams, katz_model, CountOptions, DEFAULT_K_THRESHOLD};
    use crate::ops::compose;

    #[test]
    fn one_sentence_corpus_scores_by_chain_rule() {
        let ct = count_ngrams("a b c", CountOptions::new(2)).unwrap();
        let m = katz_model(&ct, DEFAULT_K_THRESHOLD).unwrap();
        let f = build_lm_fsa(&m);
        let words = ["a", "b", "c"];
        let labels: Vec<Label> = words.iter().map(|w| m.label(w)).collect();
        let direct = m.cost(&labels);
        // Every bigram is seen once and nothing is discounted: P = 1 each.
        assert!(direct.abs() < 1e-12);
        let mut line = Fst::linear(Semiring::Tropical, &labels);
        line.copy_symbols(&f);
        let best = best_path(&compose(&line, &f).unwrap()).unwrap();
        assert!((best.weight.0 - direct).abs() < 1e-6);
    }

    #[test]
    fn unseen_words_route_through_backoff() {
        let ct = count_ngrams("a b a b a c\nb a c c\nc a b", CountOptions::new(2)).unwrap();
        let m = katz_model(&ct, DEFAULT_K_THRESHOLD).unwrap();
        let f = build_lm_fsa(&m);
        let unk = m.label("zzz");
        let w = weight_of(&f, &[unk], None).unwrap();
        assert!(w.is_finite());
        assert!(w.0 <= m.cost(&[unk]) + 1e-9);
        for q in f.states() {
            let eps = f.arcs(q).iter().filter(|a| a.ilabel == EPSILON).count();
            assert!(eps <= 1);
            let mut labels: Vec<Label> = f.arcs(q).iter().map(|a| a.ilabel).filter(|&l| l != EPSILON).collect();
            let n = labels.len();
            labels.dedup();
            assert_eq!(labels.len(), n);
        }
    }
}
