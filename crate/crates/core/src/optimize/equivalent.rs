use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use super::determinize::{determinize_seq, prepare_as, DEFAULT_EXPANSION_CAP};
use super::minimize::minimize_seq;
use super::seq::SeqFst;
use crate::error::Result;
use crate::fst::{Fst, Label};
use crate::ops::check_kinds;
use crate::semiring::{Semiring, Weight};

/// Minimal machine with states renumbered breadth-first over arcs sorted by
/// input label.
struct Canonical {
    start_weight: Weight,
    start_out: Vec<Label>,
    states: Vec<CanonicalState>,
}

/// Final weight, final output, and `(label, output, weight, next)` arcs.
type CanonicalState = (Weight, Vec<Label>, Vec<(Label, Vec<Label>, Weight, usize)>);

fn canonical(fst: &Fst, acceptor: bool) -> Result<Option<Canonical>> {
    let seq = prepare_as(fst, acceptor)?;
    let det = determinize_seq(&seq, DEFAULT_EXPANSION_CAP)?;
    let min: SeqFst = minimize_seq(&det)?;
    let Some(start) = min.start else {
        return Ok(None);
    };
    let mut ids = HashMap::from([(start, 0usize)]);
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(q) = queue.pop_front() {
        let mut arcs = min.states[q].arcs.clone();
        arcs.sort_by_key(|a| a.ilabel);
        for a in arcs {
            if let Entry::Vacant(e) = ids.entry(a.next) {
                e.insert(order.len());
                order.push(a.next);
                queue.push_back(a.next);
            }
        }
    }
    let states = order
        .iter()
        .map(|&q| {
            let st = &min.states[q];
            let mut arcs: Vec<_> = st
                .arcs
                .iter()
                .map(|a| (a.ilabel, a.out.clone(), a.weight, ids[&a.next]))
                .collect();
            arcs.sort_by_key(|a| a.0);
            (st.final_weight, st.final_out.clone(), arcs)
        })
        .collect();
    Ok(Some(Canonical {
        start_weight: min.start_weight,
        start_out: min.start_out.clone(),
        states,
    }))
}

const DELTA: f64 = 1e-9;

fn same(kind: Semiring, x: &Canonical, y: &Canonical) -> bool {
    let eq = |a: Weight, b: Weight| kind.approx_eq(a, b, DELTA);
    if !eq(x.start_weight, y.start_weight) || x.start_out != y.start_out || x.states.len() != y.states.len() {
        return false;
    }
    x.states.iter().zip(&y.states).all(|((fa, oa, aa), (fb, ob, ab))| {
        eq(*fa, *fb)
            && oa == ob
            && aa.len() == ab.len()
            && aa
                .iter()
                .zip(ab)
                .all(|(p, q)| p.0 == q.0 && p.1 == q.1 && eq(p.2, q.2) && p.3 == q.3)
    })
}

/// Whether two machines assign the same weight (and output) to every
/// input string. Both must be determinizable.
pub fn equivalent(a: &Fst, b: &Fst) -> Result<bool> {
    let kind = check_kinds(a, b)?;
    let acceptor = a.is_acceptor() && b.is_acceptor();
    let (x, y) = (canonical(a, acceptor)?, canonical(b, acceptor)?);
    Ok(match (x, y) {
        (None, None) => true,
        (Some(x), Some(y)) => same(kind, &x, &y),
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::Arc;

    #[test]
    fn perturbed_weight_is_detected() {
        let t = Semiring::Tropical;
        let mut f = Fst::new(t);
        f.add_states(3);
        f.set_start(0);
        f.add_arc(0, Arc::acceptor(1, Weight(1.0), 1));
        f.add_arc(0, Arc::acceptor(1, Weight(2.0), 2));
        f.add_arc(1, Arc::acceptor(2, Weight(1.0), 2));
        f.set_final(2, Weight(0.0));
        assert!(equivalent(&f, &f).unwrap());
        let m = super::super::minimize(&super::super::determinize(&f).unwrap()).unwrap();
        assert!(equivalent(&f, &m).unwrap());
        let mut g = f.clone();
        g.arcs_mut(1)[0].weight = Weight(1.5);
        assert!(!equivalent(&f, &g).unwrap());
        assert!(equivalent(&Fst::new(t), &Fst::new(t)).unwrap());
        assert!(!equivalent(&f, &Fst::new(t)).unwrap());
    }
}
