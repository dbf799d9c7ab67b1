//! Machines whose arcs and final states emit whole output strings.
//!
//! Determinization, string pushing and minimization of transducers move
//! output material between arcs, so they work on this representation and
//! only convert back to a label-per-arc [`Fst`] at the end. In acceptor mode
//! the outputs are implicit (equal to the input label) and every output
//! string stays empty.

use std::collections::{HashMap, VecDeque};

use crate::fst::{accessible, Arc, Fst, Label, StateId, EPSILON};
use crate::semiring::{Semiring, Weight};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SeqArc {
    pub ilabel: Label,
    pub out: Vec<Label>,
    pub weight: Weight,
    pub next: StateId,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SeqState {
    pub arcs: Vec<SeqArc>,
    pub final_weight: Weight,
    pub final_out: Vec<Label>,
}

#[derive(Debug, Clone)]
pub(crate) struct SeqFst {
    pub kind: Semiring,
    pub acceptor: bool,
    pub start: Option<StateId>,
    pub start_weight: Weight,
    pub start_out: Vec<Label>,
    pub states: Vec<SeqState>,
}

impl SeqFst {
    pub fn new(kind: Semiring, acceptor: bool) -> Self {
        SeqFst {
            kind,
            acceptor,
            start: None,
            start_weight: kind.one(),
            start_out: Vec::new(),
            states: Vec::new(),
        }
    }

    pub fn add_state(&mut self) -> StateId {
        self.states.push(SeqState {
            arcs: Vec::new(),
            final_weight: self.kind.zero(),
            final_out: Vec::new(),
        });
        self.states.len() - 1
    }

    pub fn is_final(&self, s: StateId) -> bool {
        !self.kind.is_zero(self.states[s].final_weight)
    }

    /// Direct transcription; arcs with ε output get an empty string.
    pub fn from_fst(fst: &Fst, acceptor: bool) -> Self {
        let kind = fst.semiring();
        let mut seq = SeqFst::new(kind, acceptor);
        for s in fst.states() {
            seq.add_state();
            seq.states[s].final_weight = fst.final_weight(s);
            seq.states[s].arcs = fst
                .arcs(s)
                .iter()
                .map(|a| SeqArc {
                    ilabel: a.ilabel,
                    out: if acceptor || a.olabel == EPSILON {
                        Vec::new()
                    } else {
                        vec![a.olabel]
                    },
                    weight: a.weight,
                    next: a.nextstate,
                })
                .collect();
        }
        seq.start = fst.start();
        seq.start_weight = fst.start_weight();
        seq
    }

    /// Reads back a machine written by [`SeqFst::to_fst`]: chains of
    /// single-arc ε-input states are folded into the output strings of the
    /// arcs (or final states) that lead into them. Returns `None` when the
    /// result would not be input-deterministic.
    pub fn from_deterministic_fst(fst: &Fst) -> Option<Self> {
        let kind = fst.semiring();
        let acceptor = fst.is_acceptor();
        let n = fst.num_states();
        let is_chain = |q: StateId| !fst.is_final(q) && fst.arcs(q).len() == 1 && fst.arcs(q)[0].ilabel == EPSILON;
        // Follows chain states from `q`, collecting outputs and weights.
        let follow = |mut q: StateId, out: &mut Vec<Label>, w: &mut Weight| -> Option<StateId> {
            let mut steps = 0;
            while is_chain(q) {
                let a = fst.arcs(q)[0];
                if !acceptor && a.olabel != EPSILON {
                    out.push(a.olabel);
                }
                *w = kind.times(*w, a.weight);
                q = a.nextstate;
                steps += 1;
                if steps > n {
                    return None;
                }
            }
            Some(q)
        };

        let mut seq = SeqFst::new(kind, acceptor);
        let Some(s0) = fst.start() else {
            return Some(seq);
        };
        let mut start_out = Vec::new();
        let mut start_weight = fst.start_weight();
        let real_start = follow(s0, &mut start_out, &mut start_weight)?;
        seq.start_out = start_out;
        seq.start_weight = start_weight;

        let mut ids: HashMap<StateId, StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        ids.insert(real_start, seq.add_state());
        seq.start = Some(0);
        queue.push_back(real_start);
        while let Some(q) = queue.pop_front() {
            let id = ids[&q];
            let mut seen: Vec<Label> = Vec::new();
            let mut final_set = false;
            if fst.is_final(q) {
                seq.states[id].final_weight = fst.final_weight(q);
                final_set = true;
            }
            for a in fst.arcs(q) {
                let mut out = Vec::new();
                if !acceptor && a.olabel != EPSILON {
                    out.push(a.olabel);
                }
                let mut w = a.weight;
                let t = follow(a.nextstate, &mut out, &mut w)?;
                if a.ilabel == EPSILON {
                    // Only a final-output chain may read ε.
                    if final_set || !fst.arcs(t).is_empty() || !fst.is_final(t) {
                        return None;
                    }
                    final_set = true;
                    seq.states[id].final_weight = kind.times(w, fst.final_weight(t));
                    seq.states[id].final_out = out;
                    continue;
                }
                if seen.contains(&a.ilabel) {
                    return None;
                }
                seen.push(a.ilabel);
                let next = match ids.get(&t) {
                    Some(&x) => x,
                    None => {
                        let x = seq.add_state();
                        ids.insert(t, x);
                        queue.push_back(t);
                        x
                    }
                };
                seq.states[id].arcs.push(SeqArc {
                    ilabel: a.ilabel,
                    out,
                    weight: w,
                    next,
                });
            }
        }
        Some(seq)
    }

    /// Label-per-arc machine. Multi-symbol outputs become chains of ε-input
    /// arcs; a non-empty start output becomes a chain in front of the start.
    pub fn to_fst(&self) -> Fst {
        let kind = self.kind;
        let mut fst = Fst::new(kind);
        let Some(start) = self.start else {
            return fst;
        };
        fst.add_states(self.states.len());
        let chain = |fst: &mut Fst, from: StateId, il: Label, out: &[Label], w: Weight, to: StateId| {
            if out.len() <= 1 {
                let ol = out.first().copied().unwrap_or(EPSILON);
                fst.add_arc(from, Arc::new(il, ol, w, to));
                return;
            }
            let mut cur = from;
            for (i, &o) in out.iter().enumerate() {
                let last = i + 1 == out.len();
                let next = if last { to } else { fst.add_state() };
                let (il, w) = if i == 0 { (il, w) } else { (EPSILON, kind.one()) };
                fst.add_arc(cur, Arc::new(il, o, w, next));
                cur = next;
            }
        };
        if self.start_out.is_empty() {
            fst.set_start(start);
        } else {
            let s = fst.add_state();
            fst.set_start(s);
            chain(&mut fst, s, EPSILON, &self.start_out, kind.one(), start);
        }
        fst.set_start_weight(self.start_weight);
        for (q, st) in self.states.iter().enumerate() {
            for a in &st.arcs {
                if self.acceptor {
                    fst.add_arc(q, Arc::acceptor(a.ilabel, a.weight, a.next));
                } else {
                    chain(&mut fst, q, a.ilabel, &a.out, a.weight, a.next);
                }
            }
            if !kind.is_zero(st.final_weight) {
                if st.final_out.is_empty() {
                    fst.set_final(q, st.final_weight);
                } else {
                    let t = fst.add_state();
                    fst.set_final(t, st.final_weight);
                    chain(&mut fst, q, EPSILON, &st.final_out, kind.one(), t);
                }
            }
        }
        fst
    }

    /// Keeps states that are accessible and coaccessible.
    pub fn trim(&self) -> SeqFst {
        let mut plain = Fst::new(self.kind);
        plain.add_states(self.states.len());
        if let Some(s) = self.start {
            plain.set_start(s);
        }
        for (q, st) in self.states.iter().enumerate() {
            plain.set_final(q, st.final_weight);
            for a in &st.arcs {
                if !self.kind.is_zero(a.weight) {
                    plain.add_arc(q, Arc::acceptor(1, self.kind.one(), a.next));
                }
            }
        }
        let acc = accessible(&plain);
        let coacc = crate::fst::coaccessible(&plain);
        let mut map = vec![usize::MAX; self.states.len()];
        let mut out = SeqFst::new(self.kind, self.acceptor);
        for q in 0..self.states.len() {
            if acc[q] && coacc[q] {
                map[q] = out.add_state();
            }
        }
        match self.start {
            Some(s) if map[s] != usize::MAX => {
                out.start = Some(map[s]);
                out.start_weight = self.start_weight;
                out.start_out = self.start_out.clone();
            }
            _ => {
                out.states.clear();
                return out;
            }
        }
        for (q, st) in self.states.iter().enumerate() {
            if map[q] == usize::MAX {
                continue;
            }
            let dst = &mut out.states[map[q]];
            dst.final_weight = st.final_weight;
            dst.final_out = st.final_out.clone();
            dst.arcs = st
                .arcs
                .iter()
                .filter(|a| map[a.next] != usize::MAX && !self.kind.is_zero(a.weight))
                .map(|a| SeqArc {
                    next: map[a.next],
                    ..a.clone()
                })
                .collect();
        }
        out
    }
}

pub(crate) fn lcp_len(a: &[Label], b: &[Label]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Rounds a weight so that values computed along different arithmetic
/// routes hash alike.
pub(crate) fn quantize(w: Weight) -> i64 {
    if w.0 == f64::INFINITY {
        i64::MAX
    } else {
        (w.0 * 1e6).round() as i64
    }
}
