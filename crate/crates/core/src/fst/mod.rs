//! Machine data model.
//!
//! A [`Fst`] is a weighted transducer with dense state ids, one start state
//! with an optional start weight, and a final-weight entry per state (the
//! semiring zero marks a non-final state). Acceptors are transducers whose
//! arcs all carry equal input and output labels.

mod connect;
mod machine;
mod paths;
mod symbols;
mod text;

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::semiring::{Semiring, Weight};

pub use connect::{accessible, coaccessible, connect};
pub use machine::{expand, StateMachine};
pub use paths::{enumerate_relation, weight_of, weight_of_bounded, Relation, DEFAULT_MAX_PATH_LEN};
pub use symbols::{SymbolTable, SymbolsRef};
pub use text::{read_text, write_text, write_text_with, TextOptions, WriteOptions};

/// Symbol identifier. `0` is reserved for ε.
pub type Label = u32;
pub type StateId = usize;

pub const EPSILON: Label = 0;
pub const EPSILON_SYMBOL: &str = "<eps>";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub ilabel: Label,
    pub olabel: Label,
    pub weight: Weight,
    pub nextstate: StateId,
}

impl Arc {
    pub fn new(ilabel: Label, olabel: Label, weight: Weight, nextstate: StateId) -> Self {
        Arc {
            ilabel,
            olabel,
            weight,
            nextstate,
        }
    }

    pub fn acceptor(label: Label, weight: Weight, nextstate: StateId) -> Self {
        Arc::new(label, label, weight, nextstate)
    }
}

#[derive(Debug, Clone)]
struct State {
    arcs: Vec<Arc>,
    final_weight: Weight,
}

#[derive(Debug, Clone)]
pub struct Fst {
    semiring: Semiring,
    start: Option<StateId>,
    start_weight: Weight,
    states: Vec<State>,
    isymbols: Option<SymbolsRef>,
    osymbols: Option<SymbolsRef>,
}

impl Fst {
    pub fn new(semiring: Semiring) -> Self {
        Fst {
            semiring,
            start: None,
            start_weight: semiring.one(),
            states: Vec::new(),
            isymbols: None,
            osymbols: None,
        }
    }

    /// The machine accepting exactly one label sequence with weight one.
    pub fn linear(semiring: Semiring, labels: &[Label]) -> Self {
        Fst::linear_transducer(semiring, labels, labels)
    }

    /// Single-path transducer mapping `input` to `output`, padding the
    /// shorter side with ε.
    pub fn linear_transducer(semiring: Semiring, input: &[Label], output: &[Label]) -> Self {
        let mut fst = Fst::new(semiring);
        let n = input.len().max(output.len());
        let mut s = fst.add_state();
        fst.set_start(s);
        for i in 0..n {
            let next = fst.add_state();
            let il = input.get(i).copied().unwrap_or(EPSILON);
            let ol = output.get(i).copied().unwrap_or(EPSILON);
            fst.add_arc(s, Arc::new(il, ol, semiring.one(), next));
            s = next;
        }
        fst.set_final(s, semiring.one());
        fst
    }

    /// Identity transducer (and universal acceptor) over `alphabet`, weight one.
    pub fn sigma_star(semiring: Semiring, alphabet: &[Label]) -> Self {
        let mut fst = Fst::new(semiring);
        let s = fst.add_state();
        fst.set_start(s);
        fst.set_final(s, semiring.one());
        for &l in alphabet {
            fst.add_arc(s, Arc::acceptor(l, semiring.one(), s));
        }
        fst
    }

    #[inline]
    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    #[inline]
    pub fn start(&self) -> Option<StateId> {
        self.start
    }

    pub fn start_weight(&self) -> Weight {
        self.start_weight
    }

    pub fn set_start(&mut self, s: StateId) {
        assert!(s < self.states.len(), "start state {s} does not exist");
        self.start = Some(s);
    }

    pub fn set_start_weight(&mut self, w: Weight) {
        self.start_weight = w;
    }

    pub fn add_state(&mut self) -> StateId {
        self.states.push(State {
            arcs: Vec::new(),
            final_weight: self.semiring.zero(),
        });
        self.states.len() - 1
    }

    pub fn add_states(&mut self, n: usize) {
        for _ in 0..n {
            self.add_state();
        }
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.states.iter().map(|s| s.arcs.len()).sum()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.states.len()
    }

    #[inline]
    pub fn final_weight(&self, s: StateId) -> Weight {
        self.states[s].final_weight
    }

    #[inline]
    pub fn is_final(&self, s: StateId) -> bool {
        !self.semiring.is_zero(self.states[s].final_weight)
    }

    pub fn set_final(&mut self, s: StateId, w: Weight) {
        self.states[s].final_weight = w;
    }

    #[inline]
    pub fn arcs(&self, s: StateId) -> &[Arc] {
        &self.states[s].arcs
    }

    pub fn arcs_mut(&mut self, s: StateId) -> &mut Vec<Arc> {
        &mut self.states[s].arcs
    }

    pub fn add_arc(&mut self, s: StateId, arc: Arc) {
        debug_assert!(s < self.states.len());
        self.states[s].arcs.push(arc);
    }

    pub fn isymbols(&self) -> Option<&SymbolsRef> {
        self.isymbols.as_ref()
    }

    pub fn osymbols(&self) -> Option<&SymbolsRef> {
        self.osymbols.as_ref()
    }

    pub fn set_isymbols(&mut self, t: Option<SymbolsRef>) {
        self.isymbols = t;
    }

    pub fn set_osymbols(&mut self, t: Option<SymbolsRef>) {
        self.osymbols = t;
    }

    pub fn set_symbols(&mut self, t: Option<SymbolsRef>) {
        self.isymbols = t.clone();
        self.osymbols = t;
    }

    /// Copies both symbol tables from `other`.
    pub fn copy_symbols(&mut self, other: &Fst) {
        self.isymbols = other.isymbols.clone();
        self.osymbols = other.osymbols.clone();
    }

    pub fn is_acceptor(&self) -> bool {
        self.states.iter().flat_map(|s| &s.arcs).all(|a| a.ilabel == a.olabel)
    }

    /// No ε input labels and no two arcs of a state sharing an input label.
    pub fn is_deterministic(&self) -> bool {
        let mut seen = Vec::new();
        for s in &self.states {
            seen.clear();
            for a in &s.arcs {
                if a.ilabel == EPSILON {
                    return false;
                }
                seen.push(a.ilabel);
            }
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return false;
            }
        }
        true
    }

    pub fn has_epsilons(&self) -> bool {
        self.states
            .iter()
            .flat_map(|s| &s.arcs)
            .any(|a| a.ilabel == EPSILON || a.olabel == EPSILON)
    }

    /// States in topological order, or `None` when the machine has a cycle.
    pub fn topological_order(&self) -> Option<Vec<StateId>> {
        let n = self.states.len();
        let mut indegree = vec![0usize; n];
        for s in &self.states {
            for a in &s.arcs {
                indegree[a.nextstate] += 1;
            }
        }
        let mut queue: VecDeque<StateId> = (0..n).filter(|&s| indegree[s] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for a in &self.states[s].arcs {
                indegree[a.nextstate] -= 1;
                if indegree[a.nextstate] == 0 {
                    queue.push_back(a.nextstate);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Labels occurring on the input (or output) side, sorted, without ε.
    pub fn alphabet(&self, output: bool) -> Vec<Label> {
        let mut labels: Vec<Label> = self
            .states
            .iter()
            .flat_map(|s| &s.arcs)
            .map(|a| if output { a.olabel } else { a.ilabel })
            .filter(|&l| l != EPSILON)
            .collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }

    /// Checks the structural invariants: arc targets exist, weights lie in
    /// the carrier, and the start state exists.
    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if let Some(s) = self.start {
            if s >= n {
                return Err(Error::Contract(format!("start state {s} out of range")));
            }
        } else if n > 0 && self.states.iter().any(|s| !s.arcs.is_empty()) {
            return Err(Error::Contract("machine has arcs but no start state".into()));
        }
        self.semiring.check(self.start_weight)?;
        for (q, st) in self.states.iter().enumerate() {
            self.semiring.check(st.final_weight)?;
            for a in &st.arcs {
                if a.nextstate >= n {
                    return Err(Error::Contract(format!(
                        "arc from {q} targets missing state {}",
                        a.nextstate
                    )));
                }
                self.semiring.check(a.weight)?;
            }
        }
        Ok(())
    }

    /// Applies `f` to every arc and final weight.
    pub fn map_weights(&mut self, mut f: impl FnMut(Weight) -> Weight) {
        self.start_weight = f(self.start_weight);
        for st in &mut self.states {
            if !self.semiring.is_zero(st.final_weight) {
                st.final_weight = f(st.final_weight);
            }
            for a in &mut st.arcs {
                a.weight = f(a.weight);
            }
        }
    }

    /// Reinterprets the machine in another semiring. Boolean true maps to
    /// the target one; other weights are copied as-is.
    pub fn convert(&self, target: Semiring) -> Result<Fst> {
        let src = self.semiring;
        let conv = |w: Weight| -> Result<Weight> {
            if src == target {
                return Ok(w);
            }
            if src.is_zero(w) {
                Ok(target.zero())
            } else if src == Semiring::Boolean || target == Semiring::Boolean {
                Ok(target.one())
            } else {
                target.check(w)
            }
        };
        let mut out = Fst::new(target);
        out.states = Vec::with_capacity(self.states.len());
        for st in &self.states {
            let mut arcs = Vec::with_capacity(st.arcs.len());
            for a in &st.arcs {
                let w = conv(a.weight)?;
                if !target.is_zero(w) {
                    arcs.push(Arc { weight: w, ..*a });
                }
            }
            out.states.push(State {
                arcs,
                final_weight: conv(st.final_weight)?,
            });
        }
        out.start = self.start;
        out.start_weight = conv(self.start_weight)?;
        out.copy_symbols(self);
        Ok(out)
    }

    /// Folds a non-unit start weight into the machine so that
    /// `start_weight() == one`. Adds a fresh start state when the current
    /// one has incoming arcs.
    pub fn absorb_start_weight(&mut self) {
        let k = self.semiring;
        let Some(start) = self.start else { return };
        if k.is_one(self.start_weight) {
            return;
        }
        let lambda = self.start_weight;
        let has_incoming = self.states.iter().flat_map(|s| &s.arcs).any(|a| a.nextstate == start);
        let target = if has_incoming {
            let ns = self.add_state();
            let arcs = self.states[start].arcs.clone();
            self.states[ns].arcs = arcs;
            self.states[ns].final_weight = self.states[start].final_weight;
            self.start = Some(ns);
            ns
        } else {
            start
        };
        let st = &mut self.states[target];
        if !k.is_zero(st.final_weight) {
            st.final_weight = k.times(lambda, st.final_weight);
        }
        for a in &mut st.arcs {
            a.weight = k.times(lambda, a.weight);
        }
        self.start_weight = k.one();
    }

    /// Stable sort of every state's arcs by input label.
    pub fn sort_arcs_by_ilabel(&mut self) {
        for st in &mut self.states {
            st.arcs.sort_by_key(|a| a.ilabel);
        }
    }

    pub fn sort_arcs_by_olabel(&mut self) {
        for st in &mut self.states {
            st.arcs.sort_by_key(|a| a.olabel);
        }
    }

    /// Swaps input and output labels and symbol tables.
    pub fn invert(&mut self) {
        for st in &mut self.states {
            for a in &mut st.arcs {
                std::mem::swap(&mut a.ilabel, &mut a.olabel);
            }
        }
        std::mem::swap(&mut self.isymbols, &mut self.osymbols);
    }

    pub(crate) fn clear_states(&mut self) {
        self.states.clear();
        self.start = None;
    }

    /// Drops every state not in `keep`, renumbering the survivors in
    /// ascending order.
    pub(crate) fn retain_states(&mut self, keep: &[bool]) {
        let mut map = vec![usize::MAX; self.states.len()];
        let mut next = 0;
        for (q, &k) in keep.iter().enumerate() {
            if k {
                map[q] = next;
                next += 1;
            }
        }
        let old = std::mem::take(&mut self.states);
        for (q, mut st) in old.into_iter().enumerate() {
            if !keep[q] {
                continue;
            }
            st.arcs.retain(|a| keep[a.nextstate]);
            for a in &mut st.arcs {
                a.nextstate = map[a.nextstate];
            }
            self.states.push(st);
        }
        self.start = match self.start {
            Some(s) if keep[s] => Some(map[s]),
            _ => None,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> Fst {
        let mut f = Fst::new(Semiring::Tropical);
        f.add_states(2);
        f.set_start(0);
        f.add_arc(0, Arc::new(1, 2, Weight(2.0), 1));
        f.set_final(1, Weight(0.0));
        f
    }

    #[test]
    fn determinism_checks() {
        let mut f = two_state();
        assert!(f.is_deterministic());
        f.add_arc(0, Arc::new(1, 1, Weight(0.0), 1));
        assert!(!f.is_deterministic());
        let mut g = two_state();
        g.add_arc(1, Arc::new(0, 0, Weight(0.0), 0));
        assert!(!g.is_deterministic());
    }

    #[test]
    fn absorb_start_weight_with_incoming_arcs() {
        let mut f = two_state();
        f.add_arc(1, Arc::new(1, 1, Weight(1.0), 0));
        f.set_start_weight(Weight(3.0));
        let before = weight_of(&f, &[1, 1, 1], None).unwrap();
        f.absorb_start_weight();
        assert_eq!(f.start_weight(), Weight(0.0));
        assert_eq!(f.num_states(), 3);
        assert_eq!(weight_of(&f, &[1, 1, 1], None).unwrap(), before);
        assert_eq!(before, Weight(8.0));
    }

    #[test]
    fn topological_order_detects_cycles() {
        let mut f = two_state();
        assert_eq!(f.topological_order(), Some(vec![0, 1]));
        f.add_arc(1, Arc::new(1, 1, Weight(1.0), 0));
        assert!(!f.is_acyclic());
    }

    #[test]
    fn validate_rejects_dangling_arcs() {
        let mut f = two_state();
        f.add_arc(1, Arc::new(1, 1, Weight(1.0), 9));
        assert!(matches!(f.validate(), Err(Error::Contract(_))));
    }
}
