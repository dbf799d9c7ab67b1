//! Composition with a three-state ε-filter.
//!
//! Arcs that emit ε on `A`'s output side and arcs that read ε on `B`'s input
//! side can be taken alone or together. Without control, every interleaving
//! of such moves becomes its own path and the real semiring counts the same
//! alignment several times. The filter state kept in each pair state allows:
//!
//! - a matched move or a joint ε move from state 0 (back to 0),
//! - `A` moving alone from 0 or 2 (to 2),
//! - `B` moving alone from 0 or 1 (to 1),
//!
//! which leaves exactly one path per alignment.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::fst::{connect, Arc, Fst, Label, StateId, EPSILON};
use crate::semiring::{Semiring, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComposeFilter {
    #[default]
    Epsilon,
    /// Every ε interleaving is kept. Overcounts under the real semiring;
    /// exists to show why the filter is needed.
    Unfiltered,
}

pub type FilterState = u8;

/// One outgoing move of a pair state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Move {
    pub ilabel: Label,
    pub olabel: Label,
    pub weight: Weight,
    pub next: (StateId, StateId, FilterState),
}

/// Moves out of `(s1, s2, f)` given the arcs of `s1` in `A` and of `s2` in
/// `B`. `b_arcs` must be sorted by input label.
pub(crate) fn moves(
    kind: Semiring,
    filter: ComposeFilter,
    (s1, s2, f): (StateId, StateId, FilterState),
    a_arcs: &[Arc],
    b_arcs: &[Arc],
    out: &mut Vec<Move>,
) {
    let unfiltered = filter == ComposeFilter::Unfiltered;
    let b_eps_end = b_arcs.partition_point(|b| b.ilabel == EPSILON);
    let b_eps = &b_arcs[..b_eps_end];
    for a in a_arcs {
        if a.olabel == EPSILON {
            if unfiltered || f != 1 {
                out.push(Move {
                    ilabel: a.ilabel,
                    olabel: EPSILON,
                    weight: a.weight,
                    next: (a.nextstate, s2, if unfiltered { 0 } else { 2 }),
                });
            }
            if unfiltered || f == 0 {
                for b in b_eps {
                    out.push(Move {
                        ilabel: a.ilabel,
                        olabel: b.olabel,
                        weight: kind.times(a.weight, b.weight),
                        next: (a.nextstate, b.nextstate, 0),
                    });
                }
            }
            continue;
        }
        let lo = b_arcs.partition_point(|b| b.ilabel < a.olabel);
        for b in b_arcs[lo..].iter().take_while(|b| b.ilabel == a.olabel) {
            out.push(Move {
                ilabel: a.ilabel,
                olabel: b.olabel,
                weight: kind.times(a.weight, b.weight),
                next: (a.nextstate, b.nextstate, 0),
            });
        }
    }
    if unfiltered || f != 2 {
        for b in b_eps {
            out.push(Move {
                ilabel: EPSILON,
                olabel: b.olabel,
                weight: b.weight,
                next: (s1, b.nextstate, if unfiltered { 0 } else { 1 }),
            });
        }
    }
}

pub(crate) fn check_kinds(a: &Fst, b: &Fst) -> Result<Semiring> {
    if a.semiring() != b.semiring() {
        return Err(Error::KindMismatch(a.semiring(), b.semiring()));
    }
    Ok(a.semiring())
}

/// Fails when `A`'s output table and `B`'s input table are both present
/// and differ.
pub(crate) fn check_symbols(a: &Fst, b: &Fst) -> Result<()> {
    if let (Some(x), Some(y)) = (a.osymbols(), b.isymbols()) {
        if !std::sync::Arc::ptr_eq(x, y) && **x != **y {
            return Err(Error::Symbol(
                "output symbols of the left machine differ from input symbols of the right".into(),
            ));
        }
    }
    Ok(())
}

/// `(u, w) ↦ ⊕_v A(u, v) ⊗ B(v, w)`, trimmed.
pub fn compose(a: &Fst, b: &Fst) -> Result<Fst> {
    compose_with(a, b, ComposeFilter::Epsilon)
}

pub fn compose_with(a: &Fst, b: &Fst, filter: ComposeFilter) -> Result<Fst> {
    let kind = check_kinds(a, b)?;
    check_symbols(a, b)?;
    let mut out = Fst::new(kind);
    out.set_isymbols(a.isymbols().cloned());
    out.set_osymbols(b.osymbols().cloned());
    let (Some(sa), Some(sb)) = (a.start(), b.start()) else {
        return Ok(out);
    };
    let mut bs = b.clone();
    bs.sort_arcs_by_ilabel();

    let mut ids: HashMap<(StateId, StateId, FilterState), StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let start = (sa, sb, 0);
    ids.insert(start, out.add_state());
    out.set_start(0);
    out.set_start_weight(kind.times(a.start_weight(), b.start_weight()));
    queue.push_back(start);
    let mut buf = Vec::new();
    while let Some(p) = queue.pop_front() {
        let id = ids[&p];
        out.set_final(id, kind.times(a.final_weight(p.0), bs.final_weight(p.1)));
        buf.clear();
        moves(kind, filter, p, a.arcs(p.0), bs.arcs(p.1), &mut buf);
        for m in &buf {
            let next = match ids.entry(m.next) {
                Entry::Occupied(e) => *e.get(),
                Entry::Vacant(e) => {
                    queue.push_back(m.next);
                    *e.insert(out.add_state())
                }
            };
            out.add_arc(id, Arc::new(m.ilabel, m.olabel, m.weight, next));
        }
    }
    Ok(connect(&out))
}

/// Acceptor intersection: `w ↦ A(w) ⊗ B(w)`.
pub fn intersect(a: &Fst, b: &Fst) -> Result<Fst> {
    if !a.is_acceptor() || !b.is_acceptor() {
        return Err(Error::Contract("intersect needs two acceptors".into()));
    }
    compose(a, b)
}
