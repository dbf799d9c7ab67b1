use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fst::{Arc, StateId, StateMachine};
use crate::ops::{moves, ComposeFilter, FilterState, Move};
use crate::semiring::{Semiring, Weight};

/// Composition whose pair states are built only when visited.
///
/// Pair states are numbered in registration order; `start()` registers the
/// pair of start states first. Works over any [`StateMachine`], so lazy
/// compositions nest.
pub struct LazyCompose<A, B> {
    a: A,
    b: B,
    kind: Semiring,
    filter: ComposeFilter,
    ids: HashMap<(StateId, StateId, FilterState), StateId>,
    pairs: Vec<(StateId, StateId, FilterState)>,
    arcs: Vec<Option<Vec<Arc>>>,
    expanded: usize,
    buf: Vec<Move>,
}

impl<A: StateMachine, B: StateMachine> LazyCompose<A, B> {
    pub fn new(a: A, b: B) -> Result<Self> {
        Self::with_filter(a, b, ComposeFilter::Epsilon)
    }

    pub fn with_filter(a: A, b: B, filter: ComposeFilter) -> Result<Self> {
        let kind = a.semiring();
        if b.semiring() != kind {
            return Err(Error::KindMismatch(kind, b.semiring()));
        }
        Ok(LazyCompose {
            a,
            b,
            kind,
            filter,
            ids: HashMap::new(),
            pairs: Vec::new(),
            arcs: Vec::new(),
            expanded: 0,
            buf: Vec::new(),
        })
    }

    /// Number of pair states whose arcs have been computed.
    pub fn expanded(&self) -> usize {
        self.expanded
    }

    /// Number of pair states registered so far (expanded or merely seen as
    /// an arc target).
    pub fn num_registered(&self) -> usize {
        self.pairs.len()
    }

    /// The `(A state, B state, filter state)` triple behind `state`.
    pub fn pair(&self, state: StateId) -> (StateId, StateId, FilterState) {
        self.pairs[state]
    }

    fn register(&mut self, p: (StateId, StateId, FilterState)) -> StateId {
        if let Some(&id) = self.ids.get(&p) {
            return id;
        }
        let id = self.pairs.len();
        self.ids.insert(p, id);
        self.pairs.push(p);
        self.arcs.push(None);
        id
    }
}

impl<A: StateMachine, B: StateMachine> StateMachine for LazyCompose<A, B> {
    fn semiring(&self) -> Semiring {
        self.kind
    }

    fn start(&mut self) -> Option<StateId> {
        let (sa, sb) = (self.a.start()?, self.b.start()?);
        Some(self.register((sa, sb, 0)))
    }

    fn start_weight(&mut self) -> Weight {
        let (wa, wb) = (self.a.start_weight(), self.b.start_weight());
        self.kind.times(wa, wb)
    }

    fn final_weight(&mut self, state: StateId) -> Weight {
        let (s1, s2, _) = self.pairs[state];
        let (fa, fb) = (self.a.final_weight(s1), self.b.final_weight(s2));
        self.kind.times(fa, fb)
    }

    fn arcs(&mut self, state: StateId) -> &[Arc] {
        if self.arcs[state].is_none() {
            let p = self.pairs[state];
            let a_arcs = self.a.arcs(p.0).to_vec();
            let mut b_arcs = self.b.arcs(p.1).to_vec();
            b_arcs.sort_by_key(|x| x.ilabel);
            let mut buf = std::mem::take(&mut self.buf);
            buf.clear();
            moves(self.kind, self.filter, p, &a_arcs, &b_arcs, &mut buf);
            let arcs = buf
                .iter()
                .map(|m| Arc::new(m.ilabel, m.olabel, m.weight, self.register(m.next)))
                .collect();
            self.buf = buf;
            self.arcs[state] = Some(arcs);
            self.expanded += 1;
        }
        self.arcs[state].as_deref().expect("just filled")
    }
}
