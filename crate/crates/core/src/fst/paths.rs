//! Exhaustive path enumeration.
//!
//! These functions define machine semantics by brute force and serve as the
//! reference against which the real algorithms are tested. They are
//! exponential and meant for desk-sized inputs.
//!
//! Under idempotent semirings a path that revisits a `(state, input position,
//! output position)` configuration contains a cycle that consumes nothing; it
//! cannot improve on the path without the cycle (cycle weights are assumed
//! non-negative), so such extensions are skipped. Under the real semiring
//! every path counts, and enumeration stops with [`Error::Divergence`] if a
//! still-live path outgrows the length bound.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use super::{Fst, Label, StateId, EPSILON};
use crate::error::{Error, Result};
use crate::semiring::Weight;

pub const DEFAULT_MAX_PATH_LEN: usize = 64;

/// `(input, output) -> weight` for every pair a machine accepts.
pub type Relation = BTreeMap<(Vec<Label>, Vec<Label>), Weight>;

/// ⊕ over accepting paths reading `input` and writing `output` (any output
/// when `None`) of start weight ⊗ arc weights ⊗ final weight.
pub fn weight_of(fst: &Fst, input: &[Label], output: Option<&[Label]>) -> Result<Weight> {
    weight_of_bounded(fst, input, output, DEFAULT_MAX_PATH_LEN)
}

pub fn weight_of_bounded(fst: &Fst, input: &[Label], output: Option<&[Label]>, max_path_len: usize) -> Result<Weight> {
    let kind = fst.semiring();
    let Some(start) = fst.start() else {
        return Ok(kind.zero());
    };
    let mut search = Search {
        fst,
        input,
        output,
        max_path_len,
        total: kind.zero(),
        on_path: HashSet::new(),
    };
    search.visit(start, 0, 0, fst.start_weight(), 0)?;
    Ok(search.total)
}

struct Search<'a> {
    fst: &'a Fst,
    input: &'a [Label],
    output: Option<&'a [Label]>,
    max_path_len: usize,
    total: Weight,
    on_path: HashSet<(StateId, usize, usize)>,
}

impl Search<'_> {
    fn visit(&mut self, s: StateId, ipos: usize, opos: usize, acc: Weight, depth: usize) -> Result<()> {
        let kind = self.fst.semiring();
        if kind.is_zero(acc) {
            return Ok(());
        }
        let out_done = self.output.is_none_or(|o| opos == o.len());
        if ipos == self.input.len() && out_done && self.fst.is_final(s) {
            self.total = kind.plus(self.total, kind.times(acc, self.fst.final_weight(s)));
        }
        let key = (s, ipos, if self.output.is_some() { opos } else { 0 });
        if kind.is_idempotent() && !self.on_path.insert(key) {
            return Ok(());
        }
        for a in self.fst.arcs(s) {
            let (ni, no);
            if a.ilabel == EPSILON {
                ni = ipos;
            } else if self.input.get(ipos) == Some(&a.ilabel) {
                ni = ipos + 1;
            } else {
                continue;
            }
            match self.output {
                None => no = opos,
                Some(_) if a.olabel == EPSILON => no = opos,
                Some(o) if o.get(opos) == Some(&a.olabel) => no = opos + 1,
                Some(_) => continue,
            }
            if !kind.is_idempotent() && depth >= self.max_path_len {
                return Err(Error::Divergence(format!(
                    "live path longer than {} arcs",
                    self.max_path_len
                )));
            }
            self.visit(a.nextstate, ni, no, kind.times(acc, a.weight), depth + 1)?;
        }
        if kind.is_idempotent() {
            self.on_path.remove(&key);
        }
        Ok(())
    }
}

/// Every `(input, output)` pair with `|input| <= max_input` and
/// `|output| <= max_output`, with its ⊕-accumulated weight. Pairs whose
/// weight is zero are omitted.
///
/// Idempotent semirings relax `(state, input, output)` configurations
/// instead of walking paths, since looping machines have far more paths than
/// configurations.
pub fn enumerate_relation(fst: &Fst, max_input: usize, max_output: usize) -> Result<Relation> {
    let kind = fst.semiring();
    let mut rel = Relation::new();
    let Some(start) = fst.start() else {
        return Ok(rel);
    };
    if kind.is_idempotent() {
        return Ok(relax_configurations(fst, start, max_input, max_output));
    }
    let mut enumr = Enumerate {
        fst,
        max_input,
        max_output,
        rel: &mut rel,
        on_path: HashSet::new(),
        ibuf: Vec::new(),
        obuf: Vec::new(),
    };
    enumr.visit(start, fst.start_weight(), 0)?;
    rel.retain(|_, w| !kind.is_zero(*w));
    Ok(rel)
}

/// Prefix tree interning label strings as node ids; node 0 is the empty
/// string.
struct Prefixes {
    nodes: Vec<(usize, Label, usize)>,
    children: HashMap<(usize, Label), usize>,
}

impl Prefixes {
    fn new() -> Self {
        Prefixes {
            nodes: vec![(0, EPSILON, 0)],
            children: HashMap::new(),
        }
    }

    fn len(&self, node: usize) -> usize {
        self.nodes[node].2
    }

    fn child(&mut self, node: usize, label: Label) -> usize {
        let next = self.nodes.len();
        let depth = self.nodes[node].2 + 1;
        *self.children.entry((node, label)).or_insert_with(|| {
            self.nodes.push((node, label, depth));
            next
        })
    }

    fn string(&self, mut node: usize) -> Vec<Label> {
        let mut out = Vec::with_capacity(self.nodes[node].2);
        while node != 0 {
            out.push(self.nodes[node].1);
            node = self.nodes[node].0;
        }
        out.reverse();
        out
    }
}

fn relax_configurations(fst: &Fst, start: StateId, max_input: usize, max_output: usize) -> Relation {
    let kind = fst.semiring();
    let (mut ins, mut outs) = (Prefixes::new(), Prefixes::new());
    let mut best: HashMap<(StateId, usize, usize), Weight> = HashMap::new();
    let mut queue = VecDeque::new();
    if !kind.is_zero(fst.start_weight()) {
        best.insert((start, 0, 0), fst.start_weight());
        queue.push_back((start, 0, 0));
    }
    while let Some(cfg) = queue.pop_front() {
        let w = best[&cfg];
        let (s, i, o) = cfg;
        for a in fst.arcs(s) {
            let grow_i = a.ilabel != EPSILON;
            let grow_o = a.olabel != EPSILON;
            if (grow_i && ins.len(i) == max_input) || (grow_o && outs.len(o) == max_output) {
                continue;
            }
            let nw = kind.times(w, a.weight);
            if kind.is_zero(nw) {
                continue;
            }
            let ni = if grow_i { ins.child(i, a.ilabel) } else { i };
            let no = if grow_o { outs.child(o, a.olabel) } else { o };
            let next = (a.nextstate, ni, no);
            let old = best.get(&next).copied().unwrap_or(kind.zero());
            let merged = kind.plus(old, nw);
            if merged != old {
                best.insert(next, merged);
                queue.push_back(next);
            }
        }
    }
    let mut rel = Relation::new();
    for ((s, i, o), w) in best {
        if fst.is_final(s) {
            let e = rel.entry((ins.string(i), outs.string(o))).or_insert(kind.zero());
            *e = kind.plus(*e, kind.times(w, fst.final_weight(s)));
        }
    }
    rel.retain(|_, w| !kind.is_zero(*w));
    rel
}

struct Enumerate<'a> {
    fst: &'a Fst,
    max_input: usize,
    max_output: usize,
    rel: &'a mut Relation,
    on_path: HashSet<(StateId, usize, usize)>,
    ibuf: Vec<Label>,
    obuf: Vec<Label>,
}

impl Enumerate<'_> {
    fn visit(&mut self, s: StateId, acc: Weight, depth: usize) -> Result<()> {
        let kind = self.fst.semiring();
        if kind.is_zero(acc) {
            return Ok(());
        }
        if self.fst.is_final(s) {
            let w = kind.times(acc, self.fst.final_weight(s));
            let e = self
                .rel
                .entry((self.ibuf.clone(), self.obuf.clone()))
                .or_insert(kind.zero());
            *e = kind.plus(*e, w);
        }
        let key = (s, self.ibuf.len(), self.obuf.len());
        if kind.is_idempotent() && !self.on_path.insert(key) {
            return Ok(());
        }
        for a in self.fst.arcs(s) {
            let grow_i = a.ilabel != EPSILON;
            let grow_o = a.olabel != EPSILON;
            if (grow_i && self.ibuf.len() == self.max_input) || (grow_o && self.obuf.len() == self.max_output) {
                continue;
            }
            if !kind.is_idempotent() && depth >= DEFAULT_MAX_PATH_LEN {
                return Err(Error::Divergence(format!(
                    "live path longer than {DEFAULT_MAX_PATH_LEN} arcs"
                )));
            }
            if grow_i {
                self.ibuf.push(a.ilabel);
            }
            if grow_o {
                self.obuf.push(a.olabel);
            }
            self.visit(a.nextstate, kind.times(acc, a.weight), depth + 1)?;
            if grow_i {
                self.ibuf.pop();
            }
            if grow_o {
                self.obuf.pop();
            }
        }
        if kind.is_idempotent() {
            self.on_path.remove(&key);
        }
        Ok(())
    }
}
