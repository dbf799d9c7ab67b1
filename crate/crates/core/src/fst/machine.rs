use std::collections::{HashMap, VecDeque};

use super::{Arc, Fst, StateId};
use crate::semiring::{Semiring, Weight};

/// Read access to a machine whose states may be produced on demand.
///
/// Methods take `&mut self` so that lazy implementations can register new
/// states and cache expansions. Repeated calls for the same state return the
/// same arcs in the same order.
pub trait StateMachine {
    fn semiring(&self) -> Semiring;

    fn start(&mut self) -> Option<StateId>;

    fn start_weight(&mut self) -> Weight {
        self.semiring().one()
    }

    fn final_weight(&mut self, state: StateId) -> Weight;

    fn arcs(&mut self, state: StateId) -> &[Arc];
}

impl StateMachine for Fst {
    fn semiring(&self) -> Semiring {
        Fst::semiring(self)
    }

    fn start(&mut self) -> Option<StateId> {
        Fst::start(self)
    }

    fn start_weight(&mut self) -> Weight {
        Fst::start_weight(self)
    }

    fn final_weight(&mut self, state: StateId) -> Weight {
        Fst::final_weight(self, state)
    }

    fn arcs(&mut self, state: StateId) -> &[Arc] {
        Fst::arcs(self, state)
    }
}

impl StateMachine for &Fst {
    fn semiring(&self) -> Semiring {
        Fst::semiring(self)
    }

    fn start(&mut self) -> Option<StateId> {
        Fst::start(self)
    }

    fn start_weight(&mut self) -> Weight {
        Fst::start_weight(self)
    }

    fn final_weight(&mut self, state: StateId) -> Weight {
        Fst::final_weight(self, state)
    }

    fn arcs(&mut self, state: StateId) -> &[Arc] {
        Fst::arcs(self, state)
    }
}

impl<M: StateMachine + ?Sized> StateMachine for Box<M> {
    fn semiring(&self) -> Semiring {
        (**self).semiring()
    }

    fn start(&mut self) -> Option<StateId> {
        (**self).start()
    }

    fn start_weight(&mut self) -> Weight {
        (**self).start_weight()
    }

    fn final_weight(&mut self, state: StateId) -> Weight {
        (**self).final_weight(state)
    }

    fn arcs(&mut self, state: StateId) -> &[Arc] {
        (**self).arcs(state)
    }
}

/// Materializes every state reachable from the start, numbering states in
/// breadth-first discovery order.
pub fn expand<M: StateMachine + ?Sized>(m: &mut M) -> Fst {
    let kind = m.semiring();
    let mut out = Fst::new(kind);
    let Some(start) = m.start() else {
        return out;
    };
    out.set_start_weight(m.start_weight());
    let mut ids: HashMap<StateId, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    ids.insert(start, out.add_state());
    out.set_start(0);
    queue.push_back(start);
    while let Some(s) = queue.pop_front() {
        let id = ids[&s];
        let fw = m.final_weight(s);
        out.set_final(id, fw);
        let arcs: Vec<Arc> = m.arcs(s).to_vec();
        for a in arcs {
            let next = *ids.entry(a.nextstate).or_insert_with(|| {
                queue.push_back(a.nextstate);
                out.add_state()
            });
            out.add_arc(id, Arc { nextstate: next, ..a });
        }
    }
    out
}
