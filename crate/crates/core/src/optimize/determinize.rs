//! Weighted subset construction.
//!
//! A subset state is a set of `(state, residual output, residual weight)`
//! triples: the output and weight still owed along each alternative once the
//! common part has been emitted. Residual weights are normalized so that
//! their ⊕ is one, and residual outputs share no common prefix.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::epsilon::rm_epsilon;
use super::seq::{lcp_len, quantize, SeqArc, SeqFst};
use crate::error::{Error, Result};
use crate::fst::{connect, Fst, Label, StateId, EPSILON};
use crate::semiring::{Semiring, Weight};

pub const DEFAULT_EXPANSION_CAP: usize = 10_000;

type Element = (StateId, Vec<Label>, Weight);
type Key = Vec<(StateId, Vec<Label>, i64)>;

fn key_of(subset: &[Element]) -> Key {
    subset.iter().map(|(q, s, w)| (*q, s.clone(), quantize(*w))).collect()
}

/// Adds `(q, s, w)` to `map`, ⊕-merging with an existing entry for `q`.
/// Returns whether the stored weight changed.
fn merge(
    kind: Semiring,
    map: &mut BTreeMap<StateId, (Vec<Label>, Weight)>,
    q: StateId,
    s: Vec<Label>,
    w: Weight,
) -> Result<bool> {
    match map.get_mut(&q) {
        None => {
            map.insert(q, (s, w));
            Ok(true)
        }
        Some((old_s, old_w)) => {
            if *old_s != s {
                return Err(Error::NonFunctional(format!(
                    "state {q} is reached by one input with two different outputs"
                )));
            }
            let merged = kind.plus(*old_w, w);
            let changed = merged != *old_w;
            *old_w = merged;
            Ok(changed)
        }
    }
}

/// Follows ε-input arcs from every element of `subset`.
fn eps_closure(m: &SeqFst, subset: &[Element]) -> Result<BTreeMap<StateId, (Vec<Label>, Weight)>> {
    let kind = m.kind;
    let mut map = BTreeMap::new();
    let mut queue = VecDeque::new();
    for (q, s, w) in subset {
        merge(kind, &mut map, *q, s.clone(), *w)?;
        queue.push_back(*q);
    }
    let has_eps = subset
        .iter()
        .any(|(q, _, _)| m.states[*q].arcs.iter().any(|a| a.ilabel == EPSILON));
    if !has_eps {
        return Ok(map);
    }
    let limit = (m.states.len() + 1).pow(2) * 4;
    let mut pops = 0;
    while let Some(q) = queue.pop_front() {
        pops += 1;
        if pops > limit {
            return Err(Error::Unsupported(
                "input-ε cycle that emits output or never settles".into(),
            ));
        }
        let (s, w) = map[&q].clone();
        for a in m.states[q].arcs.iter().filter(|a| a.ilabel == EPSILON) {
            let mut ns = s.clone();
            ns.extend_from_slice(&a.out);
            if merge(kind, &mut map, a.next, ns, kind.times(w, a.weight))? {
                queue.push_back(a.next);
            }
        }
    }
    Ok(map)
}

pub(crate) fn determinize_seq(m: &SeqFst, cap: usize) -> Result<SeqFst> {
    let kind = m.kind;
    let mut out = SeqFst::new(kind, m.acceptor);
    let Some(start) = m.start else {
        return Ok(out);
    };
    out.start_weight = m.start_weight;
    out.start_out = m.start_out.clone();

    let mut ids: HashMap<Key, StateId> = HashMap::new();
    let mut subsets: Vec<Vec<Element>> = Vec::new();
    let init = vec![(start, Vec::new(), kind.one())];
    ids.insert(key_of(&init), out.add_state());
    subsets.push(init);
    out.start = Some(0);

    let mut next_id = 0;
    while next_id < subsets.len() {
        let id = next_id;
        next_id += 1;
        let closed = eps_closure(m, &subsets[id])?;

        let mut final_w = kind.zero();
        let mut final_out: Option<Vec<Label>> = None;
        let mut by_label: BTreeMap<Label, BTreeMap<StateId, (Vec<Label>, Weight)>> = BTreeMap::new();
        for (&q, (s, w)) in &closed {
            let st = &m.states[q];
            if !kind.is_zero(st.final_weight) {
                let mut fo = s.clone();
                fo.extend_from_slice(&st.final_out);
                match &final_out {
                    Some(prev) if *prev != fo => {
                        return Err(Error::NonFunctional(
                            "one input string ends with two different outputs".into(),
                        ))
                    }
                    _ => final_out = Some(fo),
                }
                final_w = kind.plus(final_w, kind.times(*w, st.final_weight));
            }
            for a in st.arcs.iter().filter(|a| a.ilabel != EPSILON) {
                if kind.is_zero(a.weight) {
                    continue;
                }
                let mut ns = s.clone();
                ns.extend_from_slice(&a.out);
                let entry = by_label.entry(a.ilabel).or_default();
                merge(kind, entry, a.next, ns, kind.times(*w, a.weight))?;
            }
        }
        out.states[id].final_weight = final_w;
        out.states[id].final_out = final_out.unwrap_or_default();

        for (label, targets) in by_label {
            let total = kind.sum(targets.values().map(|(_, w)| *w));
            let first = &targets.values().next().expect("non-empty group").0;
            let common = targets.values().fold(first.len(), |n, (s, _)| n.min(lcp_len(first, s)));
            let emitted = first[..common].to_vec();
            let mut subset: Vec<Element> = Vec::with_capacity(targets.len());
            for (q, (s, w)) in targets {
                subset.push((q, s[common..].to_vec(), kind.divide(w, total)?));
            }
            let key = key_of(&subset);
            let next = match ids.get(&key) {
                Some(&x) => x,
                None => {
                    if subsets.len() >= cap {
                        return Err(Error::CapExceeded { cap });
                    }
                    let x = out.add_state();
                    ids.insert(key, x);
                    subsets.push(subset);
                    x
                }
            };
            out.states[id].arcs.push(SeqArc {
                ilabel: label,
                out: emitted,
                weight: total,
                next,
            });
        }
    }
    Ok(out)
}

/// Determinizes with the default expansion cap.
pub fn determinize(fst: &Fst) -> Result<Fst> {
    determinize_with(fst, DEFAULT_EXPANSION_CAP)
}

/// Input-deterministic equivalent of `fst`.
///
/// Acceptors come out deterministic in the strict sense. Transducer outputs
/// are delayed until they are common to every alternative, so an arc may owe
/// several output symbols; those are written as a chain of ε-input arcs
/// behind it (see [`crate::optimize::minimize`] which reads such chains back).
/// Fails with [`Error::CapExceeded`] once more than `cap` subset states are
/// built, which happens when the machine lacks the twin property.
pub fn determinize_with(fst: &Fst, cap: usize) -> Result<Fst> {
    let seq = prepare(fst)?;
    let det = determinize_seq(&seq, cap)?;
    let mut out = det.to_fst();
    out.copy_symbols(fst);
    Ok(out)
}

/// ε-free, trimmed string-output view ready for subset construction.
pub(crate) fn prepare(fst: &Fst) -> Result<SeqFst> {
    prepare_as(fst, fst.is_acceptor())
}

pub(crate) fn prepare_as(fst: &Fst, acceptor: bool) -> Result<SeqFst> {
    let kind = fst.semiring();
    if kind == Semiring::Real {
        return Err(Error::UnsupportedKind {
            op: "determinize",
            kind,
        });
    }
    let clean = rm_epsilon(&connect(fst))?;
    Ok(SeqFst::from_fst(&clean, acceptor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::{enumerate_relation, weight_of, Arc};

    const T: Semiring = Semiring::Tropical;

    #[test]
    fn shared_prefixes_collapse() {
        let mut f = Fst::new(T);
        f.add_states(4);
        f.set_start(0);
        f.add_arc(0, Arc::acceptor(1, Weight(1.0), 1));
        f.add_arc(0, Arc::acceptor(1, Weight(3.0), 2));
        f.add_arc(1, Arc::acceptor(2, Weight(5.0), 3));
        f.add_arc(2, Arc::acceptor(2, Weight(1.0), 3));
        f.set_final(3, Weight(0.0));
        let d = determinize(&f).unwrap();
        assert!(d.is_deterministic());
        assert_eq!(weight_of(&d, &[1, 2], None).unwrap(), Weight(4.0));
        assert_eq!(d.num_states(), 3);
    }

    #[test]
    fn functional_transducer_delays_output() {
        // a:x b:y | a:x c:z
        let mut f = Fst::new(T);
        f.add_states(4);
        f.set_start(0);
        f.add_arc(0, Arc::new(1, 10, Weight(1.0), 1));
        f.add_arc(0, Arc::new(1, 10, Weight(2.0), 2));
        f.add_arc(1, Arc::new(2, 11, Weight(0.0), 3));
        f.add_arc(2, Arc::new(3, 12, Weight(0.0), 3));
        f.set_final(3, Weight(0.0));
        let d = determinize(&f).unwrap();
        assert_eq!(
            enumerate_relation(&d, 3, 3).unwrap(),
            enumerate_relation(&f, 3, 3).unwrap()
        );
        assert!(SeqFst::from_deterministic_fst(&d).is_some());
    }

    #[test]
    fn real_is_unsupported() {
        let f = Fst::linear(Semiring::Real, &[1]);
        assert!(matches!(determinize(&f), Err(Error::UnsupportedKind { .. })));
    }

    #[test]
    fn non_twins_hit_the_cap() {
        // a then b-loops of different weights on two branches.
        let mut f = Fst::new(T);
        f.add_states(3);
        f.set_start(0);
        f.add_arc(0, Arc::acceptor(1, Weight(0.0), 1));
        f.add_arc(0, Arc::acceptor(1, Weight(0.0), 2));
        f.add_arc(1, Arc::acceptor(2, Weight(1.0), 1));
        f.add_arc(2, Arc::acceptor(2, Weight(2.0), 2));
        f.set_final(1, Weight(0.0));
        f.set_final(2, Weight(0.0));
        assert!(matches!(determinize_with(&f, 50), Err(Error::CapExceeded { cap: 50 })));
    }
}
