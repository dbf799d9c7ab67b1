//! Marker transducers: insert, check or delete bracket symbols at the
//! positions where a prefix language holds.

use crate::error::{Error, Result};
use crate::fst::{Arc, Fst, Label, EPSILON};
use crate::semiring::Semiring;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerType {
    /// Inserts one symbol of `insert` after every prefix in `L(alpha)`.
    Insert,
    /// Deletes symbols of `delete` found after prefixes in `L(alpha)` and
    /// rejects them anywhere else.
    DeleteWhere,
    /// Deletes symbols of `delete` found after prefixes not in `L(alpha)`
    /// and rejects them anywhere else.
    DeleteWhereNot,
}

/// Adds a non-final sink so every state has an arc for every label of `sigma`.
pub(crate) fn complete(dfa: &Fst, sigma: &[Label]) -> Fst {
    let mut d = dfa.clone();
    let kind = d.semiring();
    if d.start().is_none() {
        let s = d.add_state();
        d.set_start(s);
    }
    let mut sink = None;
    for q in d.states() {
        for &l in sigma {
            if d.arcs(q).iter().any(|a| a.ilabel == l) {
                continue;
            }
            let s = *sink.get_or_insert_with(|| d.add_state());
            d.add_arc(q, Arc::acceptor(l, kind.one(), s));
        }
    }
    if let Some(s) = sink {
        for &l in sigma {
            d.add_arc(s, Arc::acceptor(l, kind.one(), s));
        }
    }
    d
}

/// Identity loops on `labels` at every state: the language ignores them.
pub(crate) fn ignoring(f: &Fst, labels: &[Label]) -> Fst {
    let mut out = f.clone();
    let one = f.semiring().one();
    for q in out.states() {
        for &l in labels {
            out.add_arc(q, Arc::acceptor(l, one, q));
        }
    }
    out
}

/// Builds the marker transducer of `alpha`, a deterministic acceptor over
/// `sigma`. The result is tropical and copies `sigma` symbols unchanged.
pub fn marker(alpha: &Fst, sigma: &[Label], kind: MarkerType, insert: &[Label], delete: &[Label]) -> Result<Fst> {
    if !alpha.is_acceptor() || !alpha.is_deterministic() {
        return Err(Error::Contract("marker needs a deterministic acceptor".into()));
    }
    let t = Semiring::Tropical;
    let one = t.one();
    let d = complete(alpha, sigma);
    let start = d.start().expect("completed machine has a start");
    let mut out = Fst::new(t);
    out.add_states(d.num_states());
    match kind {
        MarkerType::Insert => {
            if insert.is_empty() {
                return Err(Error::Config("insert marker needs symbols to insert".into()));
            }
            // A final state q becomes an entry copy (q itself, not final)
            // followed by marking arcs into an exit copy carrying q's arcs.
            let mut exit = vec![0; d.num_states()];
            for q in d.states() {
                exit[q] = if d.is_final(q) {
                    let x = out.add_state();
                    for &m in insert {
                        out.add_arc(q, Arc::new(EPSILON, m, one, x));
                    }
                    x
                } else {
                    q
                };
                out.set_final(exit[q], one);
            }
            for q in d.states() {
                for a in d.arcs(q) {
                    out.add_arc(exit[q], Arc::new(a.ilabel, a.ilabel, one, a.nextstate));
                }
            }
        }
        MarkerType::DeleteWhere | MarkerType::DeleteWhereNot => {
            let at_final = kind == MarkerType::DeleteWhere;
            for q in d.states() {
                out.set_final(q, one);
                for a in d.arcs(q) {
                    out.add_arc(q, Arc::new(a.ilabel, a.ilabel, one, a.nextstate));
                }
                if d.is_final(q) == at_final {
                    for &m in delete {
                        out.add_arc(q, Arc::new(m, EPSILON, one, q));
                    }
                }
            }
        }
    }
    out.set_start(start);
    Ok(out)
}
