use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::fst::{Arc, StateId, StateMachine};
use crate::semiring::{Semiring, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheDiscipline {
    /// Keep every expanded state.
    Memoize,
    /// Keep at most this many states, dropping the least recently used.
    Lru(usize),
    /// Keep states the client holds with [`Cached::acquire`]; others are
    /// dropped on release or by [`Cached::sweep`].
    RefCount,
}

struct Entry {
    arcs: Vec<Arc>,
    final_weight: Weight,
    refs: usize,
    stamp: u64,
}

/// Caching view over another machine. Eviction never changes what is
/// returned, only how often the underlying machine is asked.
pub struct Cached<M> {
    inner: M,
    discipline: CacheDiscipline,
    entries: HashMap<StateId, Entry>,
    recency: VecDeque<(u64, StateId)>,
    clock: u64,
    expansions: usize,
}

impl<M: StateMachine> Cached<M> {
    pub fn new(inner: M, discipline: CacheDiscipline) -> Result<Self> {
        if discipline == CacheDiscipline::Lru(0) {
            return Err(Error::Config("LRU cache capacity must be at least 1".into()));
        }
        Ok(Cached {
            inner,
            discipline,
            entries: HashMap::new(),
            recency: VecDeque::new(),
            clock: 0,
            expansions: 0,
        })
    }

    /// Number of times the underlying machine has been asked for a state.
    pub fn expansions(&self) -> usize {
        self.expansions
    }

    pub fn cached_states(&self) -> usize {
        self.entries.len()
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }

    /// Pins `state` (expanding it if needed) until a matching release.
    pub fn acquire(&mut self, state: StateId) {
        self.fill(state);
        self.entries.get_mut(&state).expect("filled").refs += 1;
    }

    /// Drops one reference; under [`CacheDiscipline::RefCount`] the state is
    /// evicted when its count reaches zero.
    pub fn release(&mut self, state: StateId) {
        let Some(e) = self.entries.get_mut(&state) else { return };
        e.refs = e.refs.saturating_sub(1);
        if e.refs == 0 && self.discipline == CacheDiscipline::RefCount {
            self.entries.remove(&state);
        }
    }

    /// Evicts every unreferenced state (reference-counting discipline only).
    pub fn sweep(&mut self) {
        if self.discipline == CacheDiscipline::RefCount {
            self.entries.retain(|_, e| e.refs > 0);
        }
    }

    fn fill(&mut self, state: StateId) {
        self.clock += 1;
        let stamp = self.clock;
        if let Some(e) = self.entries.get_mut(&state) {
            e.stamp = stamp;
        } else {
            let arcs = self.inner.arcs(state).to_vec();
            let final_weight = self.inner.final_weight(state);
            self.expansions += 1;
            self.entries.insert(
                state,
                Entry {
                    arcs,
                    final_weight,
                    refs: 0,
                    stamp,
                },
            );
        }
        if let CacheDiscipline::Lru(cap) = self.discipline {
            self.recency.push_back((stamp, state));
            while self.entries.len() > cap {
                let (t, s) = self.recency.pop_front().expect("recency tracks entries");
                let stale = self.entries.get(&s).is_none_or(|e| e.stamp != t);
                if !stale && s != state {
                    self.entries.remove(&s);
                }
            }
        }
    }
}

impl<M: StateMachine> StateMachine for Cached<M> {
    fn semiring(&self) -> Semiring {
        self.inner.semiring()
    }

    fn start(&mut self) -> Option<StateId> {
        self.inner.start()
    }

    fn start_weight(&mut self) -> Weight {
        self.inner.start_weight()
    }

    fn final_weight(&mut self, state: StateId) -> Weight {
        self.fill(state);
        self.entries[&state].final_weight
    }

    fn arcs(&mut self, state: StateId) -> &[Arc] {
        self.fill(state);
        &self.entries[&state].arcs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::Fst;

    fn chain(n: usize) -> Fst {
        let labels: Vec<u32> = (1..=n as u32).collect();
        Fst::linear(Semiring::Tropical, &labels)
    }

    fn walk<M: StateMachine>(m: &mut M) -> Vec<Vec<Arc>> {
        let mut out = Vec::new();
        let mut s = m.start().unwrap();
        loop {
            let arcs = m.arcs(s).to_vec();
            out.push(arcs.clone());
            match arcs.first() {
                Some(a) => s = a.nextstate,
                None => break,
            }
        }
        out
    }

    #[test]
    fn memoize_expands_each_state_once() {
        let f = chain(9);
        let mut c = Cached::new(&f, CacheDiscipline::Memoize).unwrap();
        let first = walk(&mut c);
        let second = walk(&mut c);
        assert_eq!(first, second);
        assert_eq!(c.expansions(), 10);
    }

    #[test]
    fn lru_agrees_with_memoize() {
        let f = chain(9);
        let mut m = Cached::new(&f, CacheDiscipline::Memoize).unwrap();
        let mut l = Cached::new(&f, CacheDiscipline::Lru(2)).unwrap();
        let (a, b) = (walk(&mut m), walk(&mut l));
        assert_eq!(a, b);
        assert_eq!(walk(&mut l), a);
        assert!(l.cached_states() <= 2);
        assert_eq!(l.expansions(), 20);
        assert!(Cached::new(&f, CacheDiscipline::Lru(0)).is_err());
    }

    #[test]
    fn refcount_reexpands_after_release() {
        let f = chain(3);
        let mut c = Cached::new(&f, CacheDiscipline::RefCount).unwrap();
        c.acquire(0);
        c.acquire(1);
        let _ = c.arcs(0);
        assert_eq!(c.expansions(), 2);
        c.release(0);
        c.release(1);
        assert_eq!(c.cached_states(), 0);
        let _ = c.arcs(0);
        assert_eq!(c.expansions(), 3);
        c.sweep();
        assert_eq!(c.cached_states(), 0);
    }
}
