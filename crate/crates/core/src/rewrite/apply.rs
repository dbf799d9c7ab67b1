use std::collections::BTreeMap;

use crate::decode::best_path;
use crate::error::{Error, Result};
use crate::fst::{connect, Fst, Label, StateId, EPSILON};
use crate::ops::compose;
use crate::semiring::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApplyMode {
    /// Every output with its ⊕-combined weight.
    #[default]
    All,
    /// The single best output.
    Best,
}

/// Runs `input` through a compiled rule. An empty result means the rule
/// produced no output for this input.
pub fn apply_rewrite(rule: &Fst, input: &[Label], mode: ApplyMode) -> Result<Vec<(Vec<Label>, Weight)>> {
    let kind = rule.semiring();
    let mut line = Fst::linear(kind, input);
    line.set_symbols(rule.isymbols().cloned());
    let c = compose(&line, rule)?;
    if c.start().is_none() {
        return Ok(Vec::new());
    }
    if mode == ApplyMode::Best {
        return match best_path(&c) {
            Ok(p) => Ok(vec![(p.output, p.weight)]),
            Err(Error::NoPath) => Ok(Vec::new()),
            Err(e) => Err(e),
        };
    }
    let c = connect(&c);
    if !c.is_acyclic() {
        return Err(Error::Contract("rule produces infinitely many outputs".into()));
    }
    let mut found: BTreeMap<Vec<Label>, Weight> = BTreeMap::new();
    let mut stack: Vec<(StateId, Vec<Label>, Weight)> = c
        .start()
        .map(|s| (s, Vec::new(), c.start_weight()))
        .into_iter()
        .collect();
    while let Some((q, out, w)) = stack.pop() {
        if c.is_final(q) {
            let total = kind.times(w, c.final_weight(q));
            let e = found.entry(out.clone()).or_insert(kind.zero());
            *e = kind.plus(*e, total);
        }
        for a in c.arcs(q) {
            let mut o = out.clone();
            if a.olabel != EPSILON {
                o.push(a.olabel);
            }
            stack.push((a.nextstate, o, kind.times(w, a.weight)));
        }
    }
    Ok(found.into_iter().collect())
}
