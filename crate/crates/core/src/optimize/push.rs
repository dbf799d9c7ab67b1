//! Moving weights and outputs toward the start state.

use std::collections::VecDeque;

use super::seq::{lcp_len, SeqFst};
use crate::error::{Error, Result};
use crate::fst::{Fst, Label, StateId};
use crate::semiring::{Semiring, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PushMode {
    Weights,
    Strings,
}

/// Shortest tropical distance from every state to a final state
/// (final weight included), by label-correcting relaxation on the reversed
/// graph. Negative arcs are allowed; a negative cycle is an error.
pub(crate) fn distance_to_final(
    n: usize,
    edges: impl Iterator<Item = (StateId, StateId, Weight)>,
    finals: &[Weight],
) -> Result<Vec<Weight>> {
    let mut rev: Vec<Vec<(StateId, f64)>> = vec![Vec::new(); n];
    for (from, to, w) in edges {
        rev[to].push((from, w.0));
    }
    let mut d: Vec<f64> = finals.iter().map(|w| w.0).collect();
    let mut queue: VecDeque<StateId> = (0..n).filter(|&q| d[q].is_finite()).collect();
    let mut in_queue = vec![false; n];
    for &q in &queue {
        in_queue[q] = true;
    }
    let mut relaxations = vec![0usize; n];
    while let Some(q) = queue.pop_front() {
        in_queue[q] = false;
        for &(p, w) in &rev[q] {
            let nd = d[q] + w;
            if nd < d[p] {
                d[p] = nd;
                relaxations[p] += 1;
                if relaxations[p] > n + 1 {
                    return Err(Error::Contract("negative-weight cycle".into()));
                }
                if !in_queue[p] {
                    in_queue[p] = true;
                    queue.push_back(p);
                }
            }
        }
    }
    Ok(d.into_iter().map(Weight).collect())
}

pub(crate) fn push_weights_seq(m: &mut SeqFst) -> Result<()> {
    if m.kind != Semiring::Tropical {
        return Ok(());
    }
    let Some(start) = m.start else { return Ok(()) };
    let n = m.states.len();
    let edges = m
        .states
        .iter()
        .enumerate()
        .flat_map(|(q, st)| st.arcs.iter().map(move |a| (q, a.next, a.weight)));
    let finals: Vec<Weight> = m.states.iter().map(|s| s.final_weight).collect();
    let d = distance_to_final(n, edges, &finals)?;
    if let Some(q) = d.iter().position(|w| !w.is_finite()) {
        return Err(Error::Contract(format!(
            "state {q} cannot reach a final state; trim first"
        )));
    }
    for (q, st) in m.states.iter_mut().enumerate() {
        for a in &mut st.arcs {
            a.weight = Weight(a.weight.0 + d[a.next].0 - d[q].0);
        }
        if st.final_weight.is_finite() {
            st.final_weight = Weight(st.final_weight.0 - d[q].0);
        }
    }
    m.start_weight = Weight(m.start_weight.0 + d[start].0);
    Ok(())
}

/// Longest common prefix of all outputs from each state to a final state.
fn string_potentials(m: &SeqFst) -> Result<Vec<Vec<Label>>> {
    let n = m.states.len();
    let mut p: Vec<Option<Vec<Label>>> = vec![None; n];
    let mut changed = true;
    while changed {
        changed = false;
        for q in 0..n {
            let st = &m.states[q];
            let mut acc: Option<Vec<Label>> = if m.is_final(q) {
                Some(st.final_out.clone())
            } else {
                None
            };
            for a in &st.arcs {
                let Some(tail) = &p[a.next] else { continue };
                let mut cand = a.out.clone();
                cand.extend_from_slice(tail);
                acc = Some(match acc {
                    None => cand,
                    Some(mut cur) => {
                        let k = lcp_len(&cur, &cand);
                        cur.truncate(k);
                        cur
                    }
                });
            }
            if acc != p[q] {
                p[q] = acc;
                changed = true;
            }
        }
    }
    p.into_iter()
        .enumerate()
        .map(|(q, x)| x.ok_or_else(|| Error::Contract(format!("state {q} cannot reach a final state; trim first"))))
        .collect()
}

pub(crate) fn push_strings_seq(m: &mut SeqFst) -> Result<()> {
    if m.acceptor {
        return Ok(());
    }
    let Some(start) = m.start else { return Ok(()) };
    let p = string_potentials(m)?;
    for q in 0..m.states.len() {
        let k = p[q].len();
        let st = &mut m.states[q];
        for a in &mut st.arcs {
            let mut full = std::mem::take(&mut a.out);
            full.extend_from_slice(&p[a.next]);
            a.out = full[k..].to_vec();
        }
        if !m.kind.is_zero(st.final_weight) {
            st.final_out.drain(..k);
        }
    }
    m.start_out.extend_from_slice(&p[start]);
    Ok(())
}

/// Pushes weights (tropical) or output strings toward the start.
///
/// Weight pushing reweights every arc `q -> r` by the potential `d`, the
/// shortest distance to a final state: `w' = w + d(r) - d(q)`. Afterwards
/// the best continuation out of every state costs zero and the whole path
/// minimum sits on the start. Boolean machines come back unchanged. Every
/// state must be coaccessible.
pub fn push(fst: &Fst, mode: PushMode) -> Result<Fst> {
    let kind = fst.semiring();
    match mode {
        PushMode::Weights => {
            if kind == Semiring::Real {
                return Err(Error::UnsupportedKind { op: "push", kind });
            }
            if kind == Semiring::Boolean || fst.start().is_none() {
                return Ok(fst.clone());
            }
            let edges = fst
                .states()
                .flat_map(|q| fst.arcs(q).iter().map(move |a| (q, a.nextstate, a.weight)));
            let finals: Vec<Weight> = fst.states().map(|q| fst.final_weight(q)).collect();
            let d = distance_to_final(fst.num_states(), edges, &finals)?;
            if let Some(q) = d.iter().position(|w| !w.is_finite()) {
                return Err(Error::Contract(format!(
                    "state {q} cannot reach a final state; trim first"
                )));
            }
            let mut out = fst.clone();
            for q in out.states() {
                let dq = d[q].0;
                for a in out.arcs_mut(q) {
                    a.weight = Weight(a.weight.0 + d[a.nextstate].0 - dq);
                }
                if out.is_final(q) {
                    let f = out.final_weight(q);
                    out.set_final(q, Weight(f.0 - dq));
                }
            }
            let start = fst.start().expect("checked above");
            out.set_start_weight(Weight(fst.start_weight().0 + d[start].0));
            out.absorb_start_weight();
            Ok(out)
        }
        PushMode::Strings => {
            if fst.is_acceptor() || fst.start().is_none() {
                return Ok(fst.clone());
            }
            let mut seq = SeqFst::from_fst(fst, false);
            push_strings_seq(&mut seq)?;
            let mut out = seq.to_fst();
            out.copy_symbols(fst);
            Ok(out)
        }
    }
}
