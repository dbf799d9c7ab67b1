//! Minimization: push, then partition refinement over encoded labels.

use std::collections::HashMap;

use super::push::{push_strings_seq, push_weights_seq};
use super::seq::{quantize, SeqArc, SeqFst};
use crate::error::{Error, Result};
use crate::fst::{Fst, Label, StateId};
use crate::semiring::Semiring;

/// Refinable partition of `0..n` (elements of a block are contiguous).
struct Partition {
    elems: Vec<usize>,
    loc: Vec<usize>,
    block_of: Vec<usize>,
    start: Vec<usize>,
    end: Vec<usize>,
    marked: Vec<usize>,
}

impl Partition {
    fn new(classes: &[usize]) -> Self {
        let n = classes.len();
        let nblocks = classes.iter().copied().max().map_or(0, |m| m + 1);
        let mut counts = vec![0usize; nblocks];
        for &c in classes {
            counts[c] += 1;
        }
        let mut start = vec![0; nblocks];
        for b in 1..nblocks {
            start[b] = start[b - 1] + counts[b - 1];
        }
        let end: Vec<usize> = (0..nblocks).map(|b| start[b] + counts[b]).collect();
        let mut fill = start.clone();
        let mut elems = vec![0; n];
        let mut loc = vec![0; n];
        for (x, &c) in classes.iter().enumerate() {
            elems[fill[c]] = x;
            loc[x] = fill[c];
            fill[c] += 1;
        }
        Partition {
            elems,
            loc,
            block_of: classes.to_vec(),
            start,
            end,
            marked: vec![0; nblocks],
        }
    }

    fn len(&self) -> usize {
        self.start.len()
    }

    fn size(&self, b: usize) -> usize {
        self.end[b] - self.start[b]
    }

    fn mark(&mut self, x: usize, touched: &mut Vec<usize>) {
        let b = self.block_of[x];
        let pos = self.loc[x];
        let slot = self.start[b] + self.marked[b];
        if pos < slot {
            return;
        }
        let y = self.elems[slot];
        self.elems.swap(pos, slot);
        self.loc[x] = slot;
        self.loc[y] = pos;
        if self.marked[b] == 0 {
            touched.push(b);
        }
        self.marked[b] += 1;
    }

    /// Splits the marked part off block `b`; returns the new block id.
    fn split(&mut self, b: usize) -> Option<usize> {
        let m = std::mem::take(&mut self.marked[b]);
        if m == 0 || m == self.size(b) {
            return None;
        }
        let nb = self.start.len();
        let s = self.start[b];
        self.start.push(s);
        self.end.push(s + m);
        self.marked.push(0);
        self.start[b] = s + m;
        for i in s..s + m {
            let x = self.elems[i];
            self.block_of[x] = nb;
        }
        Some(nb)
    }
}

/// Coarsest partition of a partial DFA compatible with `classes`.
/// `trans[q]` lists `(label, target)` with at most one target per label.
pub(crate) fn refine(classes: &[usize], trans: &[Vec<(usize, StateId)>]) -> Vec<usize> {
    let n = classes.len();
    let mut rev: Vec<Vec<(usize, StateId)>> = vec![Vec::new(); n];
    for (q, ts) in trans.iter().enumerate() {
        for &(l, t) in ts {
            rev[t].push((l, q));
        }
    }
    let mut part = Partition::new(classes);
    // With missing transitions every initial block must serve as a splitter.
    let mut work: Vec<usize> = (0..part.len()).collect();
    let mut in_work = vec![true; part.len()];
    let mut by_label: HashMap<usize, Vec<StateId>> = HashMap::new();
    let mut touched = Vec::new();
    while let Some(b) = work.pop() {
        in_work[b] = false;
        by_label.clear();
        for i in part.start[b]..part.end[b] {
            let t = part.elems[i];
            for &(l, q) in &rev[t] {
                by_label.entry(l).or_default().push(q);
            }
        }
        let mut labels: Vec<usize> = by_label.keys().copied().collect();
        labels.sort_unstable();
        for l in labels {
            touched.clear();
            for &q in &by_label[&l] {
                part.mark(q, &mut touched);
            }
            for &y in &touched.clone() {
                if let Some(z) = part.split(y) {
                    in_work.push(false);
                    if in_work[y] {
                        work.push(z);
                        in_work[z] = true;
                    } else {
                        let smaller = if part.size(z) <= part.size(y) { z } else { y };
                        work.push(smaller);
                        in_work[smaller] = true;
                    }
                }
            }
        }
    }
    part.block_of
}

/// Encoded arc label: input, output string, quantized weight.
type ArcKey = (Label, Vec<Label>, i64);

pub(crate) fn minimize_seq(m: &SeqFst) -> Result<SeqFst> {
    let mut m = m.trim();
    let Some(start) = m.start else {
        return Ok(m);
    };
    push_weights_seq(&mut m)?;
    push_strings_seq(&mut m)?;

    let n = m.states.len();
    let mut final_ids: HashMap<Option<(i64, Vec<Label>)>, usize> = HashMap::new();
    let classes: Vec<usize> = (0..n)
        .map(|q| {
            let st = &m.states[q];
            let sig = m.is_final(q).then(|| (quantize(st.final_weight), st.final_out.clone()));
            let next = final_ids.len();
            *final_ids.entry(sig).or_insert(next)
        })
        .collect();
    let mut label_ids: HashMap<ArcKey, usize> = HashMap::new();
    let trans: Vec<Vec<(usize, StateId)>> = m
        .states
        .iter()
        .map(|st| {
            st.arcs
                .iter()
                .map(|a| {
                    let key = (a.ilabel, a.out.clone(), quantize(a.weight));
                    let next = label_ids.len();
                    (*label_ids.entry(key).or_insert(next), a.next)
                })
                .collect()
        })
        .collect();
    let blocks = refine(&classes, &trans);

    // Number blocks by first occurrence, start block first.
    let mut block_id: HashMap<usize, StateId> = HashMap::new();
    let mut reps: Vec<StateId> = Vec::new();
    for q in std::iter::once(start).chain(0..n) {
        block_id.entry(blocks[q]).or_insert_with(|| {
            reps.push(q);
            reps.len() - 1
        });
    }
    let mut out = SeqFst::new(m.kind, m.acceptor);
    out.start = Some(0);
    out.start_weight = m.start_weight;
    out.start_out = m.start_out.clone();
    for &r in &reps {
        let id = out.add_state();
        let st = &m.states[r];
        out.states[id].final_weight = st.final_weight;
        out.states[id].final_out = st.final_out.clone();
        out.states[id].arcs = st
            .arcs
            .iter()
            .map(|a| SeqArc {
                next: block_id[&blocks[a.next]],
                ..a.clone()
            })
            .collect();
    }
    Ok(out)
}

/// Minimal deterministic equivalent of a deterministic machine.
///
/// The input must be input-deterministic; transducer outputs may be spread
/// over ε-input chains as produced by [`crate::optimize::determinize`]. Weights
/// and outputs are pushed first, so states whose futures differ only by a
/// constant merge. States that cannot reach a final state are dropped.
pub fn minimize(fst: &Fst) -> Result<Fst> {
    let kind = fst.semiring();
    if kind == Semiring::Real {
        return Err(Error::UnsupportedKind { op: "minimize", kind });
    }
    let seq = SeqFst::from_deterministic_fst(fst)
        .ok_or_else(|| Error::Contract("minimize needs a deterministic machine; determinize first".into()))?;
    let mut out = minimize_seq(&seq.trim())?.to_fst();
    out.copy_symbols(fst);
    Ok(out)
}
