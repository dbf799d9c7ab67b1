//! Local determinization: subset construction restricted to states with a
//! large out-degree.
//!
//! Arcs are grouped by their `(input, output)` label pair, so transducers
//! need no output residuals. Every original state keeps its id; a group of
//! two or more arcs sharing a label pair is replaced by one arc into a new
//! subset state. Subset states are expanded the same way when their combined
//! out-degree exceeds `k` and otherwise fall back to the original arcs. ε
//! arcs are never merged. The number of subset states is capped at
//! `|Q| · max out-degree`, after which groups are left unmerged, so the
//! procedure always terminates.

use std::collections::{BTreeMap, HashMap};

use super::seq::quantize;
use crate::error::{Error, Result};
use crate::fst::{connect, Arc, Fst, Label, StateId, EPSILON};
use crate::semiring::{Semiring, Weight};

type Members = Vec<(StateId, Weight)>;

struct Builder<'a> {
    src: &'a Fst,
    k: usize,
    cap: usize,
    out: Fst,
    ids: HashMap<Vec<(StateId, i64)>, StateId>,
    pending: Vec<(StateId, Members)>,
    created: usize,
}

impl Builder<'_> {
    fn outdeg(&self, members: &Members) -> usize {
        members.iter().map(|(q, _)| self.src.arcs(*q).len()).sum()
    }

    /// Writes the arcs of the state `id`, which stands for `members`.
    fn expand(&mut self, id: StateId, members: &Members) -> Result<()> {
        let kind = self.src.semiring();
        if self.outdeg(members) <= self.k {
            for &(q, w) in members {
                for a in self.src.arcs(q) {
                    self.out.add_arc(
                        id,
                        Arc {
                            weight: kind.times(w, a.weight),
                            ..*a
                        },
                    );
                }
            }
            return Ok(());
        }
        let mut groups: BTreeMap<(Label, Label), BTreeMap<StateId, Weight>> = BTreeMap::new();
        for &(q, w) in members {
            for a in self.src.arcs(q) {
                let aw = kind.times(w, a.weight);
                if a.ilabel == EPSILON {
                    self.out.add_arc(id, Arc { weight: aw, ..*a });
                    continue;
                }
                let g = groups.entry((a.ilabel, a.olabel)).or_default();
                let e = g.entry(a.nextstate).or_insert(kind.zero());
                *e = kind.plus(*e, aw);
            }
        }
        for ((il, ol), targets) in groups {
            if targets.len() == 1 {
                let (&t, &w) = targets.iter().next().unwrap();
                self.out.add_arc(id, Arc::new(il, ol, w, t));
                continue;
            }
            let total = kind.sum(targets.values().copied());
            let mut subset: Members = Vec::with_capacity(targets.len());
            for (&t, &w) in &targets {
                subset.push((t, kind.divide(w, total)?));
            }
            let key: Vec<(StateId, i64)> = subset.iter().map(|&(q, w)| (q, quantize(w))).collect();
            let next = match self.ids.get(&key) {
                Some(&x) => Some(x),
                None if self.created < self.cap => {
                    let x = self.out.add_state();
                    let fw = kind.sum(subset.iter().map(|&(q, w)| kind.times(w, self.src.final_weight(q))));
                    self.out.set_final(x, fw);
                    self.ids.insert(key, x);
                    self.pending.push((x, subset));
                    self.created += 1;
                    Some(x)
                }
                None => None,
            };
            match next {
                Some(x) => self.out.add_arc(id, Arc::new(il, ol, total, x)),
                None => {
                    for (&t, &w) in &targets {
                        self.out.add_arc(id, Arc::new(il, ol, w, t));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Applies subset construction only at states whose out-degree exceeds `k`.
/// Returns a copy of `fst` when no state qualifies.
pub fn local_determinize(fst: &Fst, k: usize) -> Result<Fst> {
    let kind = fst.semiring();
    if k == 0 {
        return Err(Error::Config("local determinization needs k >= 1".into()));
    }
    if kind == Semiring::Real {
        return Err(Error::UnsupportedKind {
            op: "local determinization",
            kind,
        });
    }
    let max_out = fst.states().map(|q| fst.arcs(q).len()).max().unwrap_or(0);
    if max_out <= k {
        return Ok(fst.clone());
    }
    let mut out = Fst::new(kind);
    out.copy_symbols(fst);
    out.add_states(fst.num_states());
    if let Some(s) = fst.start() {
        out.set_start(s);
        out.set_start_weight(fst.start_weight());
    }
    for q in fst.states() {
        out.set_final(q, fst.final_weight(q));
    }
    let mut b = Builder {
        src: fst,
        k,
        cap: fst.num_states() * max_out,
        out,
        ids: HashMap::new(),
        pending: Vec::new(),
        created: 0,
    };
    for q in fst.states() {
        b.expand(q, &vec![(q, kind.one())])?;
    }
    while let Some((id, members)) = b.pending.pop() {
        b.expand(id, &members)?;
    }
    Ok(connect(&b.out))
}
