use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::fst::{connect, Arc, Fst, StateId, EPSILON};
use crate::semiring::{Semiring, Weight};

fn is_eps(a: &Arc) -> bool {
    a.ilabel == EPSILON && a.olabel == EPSILON
}

/// ε-closure distances from `p` over `ε:ε` arcs.
fn closure_idempotent(fst: &Fst, p: StateId) -> Result<BTreeMap<StateId, Weight>> {
    let kind = fst.semiring();
    let mut dist = BTreeMap::new();
    dist.insert(p, kind.one());
    let mut queue = VecDeque::from([p]);
    let mut pops = 0usize;
    let limit = (fst.num_states() + 1).pow(2) * 4;
    while let Some(q) = queue.pop_front() {
        pops += 1;
        if pops > limit {
            return Err(Error::Divergence(format!(
                "ε-closure of state {p} does not settle (negative ε-cycle?)"
            )));
        }
        let dq = dist[&q];
        for a in fst.arcs(q).iter().filter(|a| is_eps(a)) {
            let nd = kind.times(dq, a.weight);
            let old = dist.get(&a.nextstate).copied().unwrap_or(kind.zero());
            let merged = kind.plus(old, nd);
            if merged != old {
                dist.insert(a.nextstate, merged);
                if !queue.contains(&a.nextstate) {
                    queue.push_back(a.nextstate);
                }
            }
        }
    }
    Ok(dist)
}

/// Real-semiring closure; the ε subgraph must be acyclic.
fn closure_real(fst: &Fst, p: StateId, order: &[StateId], rank: &[usize]) -> BTreeMap<StateId, Weight> {
    let kind = fst.semiring();
    let mut dist = BTreeMap::new();
    dist.insert(p, kind.one());
    for &q in &order[rank[p]..] {
        let Some(&dq) = dist.get(&q) else { continue };
        for a in fst.arcs(q).iter().filter(|a| is_eps(a)) {
            let e = dist.entry(a.nextstate).or_insert(kind.zero());
            *e = kind.plus(*e, kind.times(dq, a.weight));
        }
    }
    dist
}

/// Removes every `ε:ε` arc, preserving the weighted relation. Arcs with ε on
/// one side only are kept. The result is trimmed.
pub fn rm_epsilon(fst: &Fst) -> Result<Fst> {
    let kind = fst.semiring();
    if !fst.states().any(|s| fst.arcs(s).iter().any(is_eps)) {
        return Ok(connect(fst));
    }
    let real_order = if kind == Semiring::Real {
        let mut eps_only = Fst::new(kind);
        eps_only.add_states(fst.num_states());
        for s in fst.states() {
            for a in fst.arcs(s).iter().filter(|a| is_eps(a)) {
                eps_only.add_arc(s, *a);
            }
        }
        let order = eps_only
            .topological_order()
            .ok_or_else(|| Error::Divergence("ε-cycle under the real semiring".into()))?;
        let mut rank = vec![0; order.len()];
        for (i, &q) in order.iter().enumerate() {
            rank[q] = i;
        }
        Some((order, rank))
    } else {
        None
    };

    let mut out = Fst::new(kind);
    out.copy_symbols(fst);
    out.add_states(fst.num_states());
    if let Some(s) = fst.start() {
        out.set_start(s);
        out.set_start_weight(fst.start_weight());
    }
    for p in fst.states() {
        let dist = match &real_order {
            Some((order, rank)) => closure_real(fst, p, order, rank),
            None => closure_idempotent(fst, p)?,
        };
        let mut fw = kind.zero();
        for (&q, &d) in &dist {
            if kind.is_zero(d) {
                continue;
            }
            fw = kind.plus(fw, kind.times(d, fst.final_weight(q)));
            for a in fst.arcs(q).iter().filter(|a| !is_eps(a)) {
                out.add_arc(
                    p,
                    Arc {
                        weight: kind.times(d, a.weight),
                        ..*a
                    },
                );
            }
        }
        out.set_final(p, fw);
    }
    Ok(connect(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::enumerate_relation;

    #[test]
    fn removes_epsilons_preserving_weights() {
        for kind in [Semiring::Tropical, Semiring::Real] {
            let mut f = Fst::new(kind);
            f.add_states(4);
            f.set_start(0);
            f.add_arc(0, Arc::new(0, 0, Weight(0.5), 1));
            f.add_arc(0, Arc::new(1, 1, Weight(0.25), 2));
            f.add_arc(1, Arc::new(1, 1, Weight(0.5), 2));
            f.add_arc(1, Arc::new(0, 0, Weight(0.5), 3));
            f.add_arc(2, Arc::new(2, 3, Weight(1.0), 3));
            f.set_final(3, Weight(1.0));
            let g = rm_epsilon(&f).unwrap();
            assert!(!g.states().any(|s| g.arcs(s).iter().any(is_eps)));
            let (a, b) = (
                enumerate_relation(&f, 3, 3).unwrap(),
                enumerate_relation(&g, 3, 3).unwrap(),
            );
            assert_eq!(a.len(), b.len());
            for (k, w) in &a {
                assert!(kind.approx_eq(*w, b[k], 1e-12), "{kind} {k:?}");
            }
        }
    }

    #[test]
    fn real_epsilon_cycle_is_refused() {
        let mut f = Fst::new(Semiring::Real);
        f.add_states(1);
        f.set_start(0);
        f.add_arc(0, Arc::new(0, 0, Weight(0.5), 0));
        assert!(rm_epsilon(&f).is_err());
    }
}
