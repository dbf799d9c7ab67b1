//! Single-source shortest distances in the tropical semiring.
//!
//! | algorithm      | queue         | needs                 | cost         |
//! |----------------|---------------|-----------------------|--------------|
//! | `Acyclic`      | topological   | no cycles             | O(V + E)     |
//! | `Dijkstra`     | best-first    | no negative weights   | O(E log V)   |
//! | `BellmanFord`  | FIFO          | no negative cycles    | O(V · E)     |

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::fst::{Fst, Label, StateId, EPSILON};
use crate::semiring::{Semiring, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShortestPathAlgo {
    Acyclic,
    Dijkstra,
    BellmanFord,
}

/// Predecessor of a state on its best path: source state and arc index.
pub(crate) type Pred = Option<(StateId, usize)>;

fn require_tropical(fst: &Fst, op: &'static str) -> Result<()> {
    match fst.semiring() {
        Semiring::Tropical => Ok(()),
        kind => Err(Error::UnsupportedKind { op, kind }),
    }
}

#[derive(PartialEq)]
struct Key(f64, StateId);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Forward distances plus best-path predecessors. When two predecessors
/// tie, the one with the smaller state id wins.
pub(crate) fn forward(fst: &Fst, algo: ShortestPathAlgo) -> Result<(Vec<Weight>, Vec<Pred>)> {
    let n = fst.num_states();
    let mut d = vec![f64::INFINITY; n];
    let mut pred: Vec<Pred> = vec![None; n];
    let Some(start) = fst.start() else {
        return Ok((Vec::new(), Vec::new()));
    };
    d[start] = fst.start_weight().0;
    match algo {
        ShortestPathAlgo::Acyclic => {
            let order = fst
                .topological_order()
                .ok_or_else(|| Error::Contract("acyclic shortest distance given a cyclic machine".into()))?;
            for u in order {
                if !d[u].is_finite() {
                    continue;
                }
                for (k, a) in fst.arcs(u).iter().enumerate() {
                    let nd = d[u] + a.weight.0;
                    let v = a.nextstate;
                    if nd < d[v] || (nd == d[v] && pred[v].is_some_and(|(p, _)| u < p)) {
                        d[v] = nd;
                        pred[v] = Some((u, k));
                    }
                }
            }
        }
        ShortestPathAlgo::Dijkstra => {
            if fst.states().any(|q| fst.arcs(q).iter().any(|a| a.weight.0 < 0.0)) {
                return Err(Error::Contract("Dijkstra given a negative arc weight".into()));
            }
            let mut done = vec![false; n];
            let mut heap = BinaryHeap::from([Reverse(Key(d[start], start))]);
            while let Some(Reverse(Key(du, u))) = heap.pop() {
                if done[u] || du > d[u] {
                    continue;
                }
                done[u] = true;
                for (k, a) in fst.arcs(u).iter().enumerate() {
                    let v = a.nextstate;
                    if done[v] {
                        continue;
                    }
                    let nd = du + a.weight.0;
                    if nd < d[v] || (nd == d[v] && pred[v].is_some_and(|(p, _)| u < p)) {
                        d[v] = nd;
                        pred[v] = Some((u, k));
                        heap.push(Reverse(Key(nd, v)));
                    }
                }
            }
        }
        ShortestPathAlgo::BellmanFord => {
            let mut queue = VecDeque::from([start]);
            let mut in_queue = vec![false; n];
            in_queue[start] = true;
            // Arcs on the current best path to each state; a best path of n
            // arcs must repeat a state, so its cycle is negative.
            let mut arcs_on_path = vec![0usize; n];
            while let Some(u) = queue.pop_front() {
                in_queue[u] = false;
                for (k, a) in fst.arcs(u).iter().enumerate() {
                    let v = a.nextstate;
                    let nd = d[u] + a.weight.0;
                    if nd < d[v] {
                        d[v] = nd;
                        pred[v] = Some((u, k));
                        arcs_on_path[v] = arcs_on_path[u] + 1;
                        if arcs_on_path[v] >= n {
                            return Err(Error::Contract("negative-weight cycle".into()));
                        }
                        if !in_queue[v] {
                            in_queue[v] = true;
                            queue.push_back(v);
                        }
                    }
                }
            }
        }
    }
    Ok((d.into_iter().map(Weight).collect(), pred))
}

/// Best weight from the start (start weight included) to every state;
/// unreachable states get `inf`.
pub fn shortest_distance(fst: &Fst, algo: ShortestPathAlgo) -> Result<Vec<Weight>> {
    require_tropical(fst, "shortest distance")?;
    Ok(forward(fst, algo)?.0)
}

/// Best weight from every state to a final state, final weight included.
pub fn shortest_distance_to_final(fst: &Fst) -> Result<Vec<Weight>> {
    require_tropical(fst, "shortest distance")?;
    let edges = fst
        .states()
        .flat_map(|q| fst.arcs(q).iter().map(move |a| (q, a.nextstate, a.weight)));
    let finals: Vec<Weight> = fst.states().map(|q| fst.final_weight(q)).collect();
    crate::optimize::distance_to_final(fst.num_states(), edges, &finals)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub input: Vec<Label>,
    pub output: Vec<Label>,
    pub weight: Weight,
    /// Visited states, start first.
    pub states: Vec<StateId>,
}

/// Lowest-cost accepting path. Ties go to the smaller final state id and
/// then to smaller predecessor ids.
pub fn best_path(fst: &Fst) -> Result<Path> {
    require_tropical(fst, "best path")?;
    let algo = if fst.is_acyclic() {
        ShortestPathAlgo::Acyclic
    } else if fst.states().all(|q| fst.arcs(q).iter().all(|a| a.weight.0 >= 0.0)) {
        ShortestPathAlgo::Dijkstra
    } else {
        ShortestPathAlgo::BellmanFord
    };
    let (d, pred) = forward(fst, algo)?;
    let mut best: Option<(f64, StateId)> = None;
    for q in fst.states() {
        let total = d[q].0 + fst.final_weight(q).0;
        if total.is_finite() && best.is_none_or(|(b, _)| total < b) {
            best = Some((total, q));
        }
    }
    let (weight, last) = best.ok_or(Error::NoPath)?;
    let mut states = vec![last];
    let mut arcs = Vec::new();
    let mut cur = last;
    while let Some((p, k)) = pred[cur] {
        arcs.push(fst.arcs(p)[k]);
        states.push(p);
        cur = p;
    }
    states.reverse();
    arcs.reverse();
    Ok(Path {
        input: arcs.iter().map(|a| a.ilabel).filter(|&l| l != EPSILON).collect(),
        output: arcs.iter().map(|a| a.olabel).filter(|&l| l != EPSILON).collect(),
        weight: Weight(weight),
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::Arc;

    #[test]
    fn single_arc_distance() {
        let mut f = Fst::new(Semiring::Tropical);
        f.add_states(2);
        f.set_start(0);
        f.add_arc(0, Arc::acceptor(1, Weight(2.5), 1));
        for algo in [
            ShortestPathAlgo::Acyclic,
            ShortestPathAlgo::Dijkstra,
            ShortestPathAlgo::BellmanFord,
        ] {
            assert_eq!(shortest_distance(&f, algo).unwrap(), vec![Weight(0.0), Weight(2.5)]);
        }
    }

    #[test]
    fn contracts_are_enforced() {
        let mut f = Fst::new(Semiring::Tropical);
        f.add_states(2);
        f.set_start(0);
        f.add_arc(0, Arc::acceptor(1, Weight(-1.0), 1));
        f.add_arc(1, Arc::acceptor(1, Weight(2.0), 0));
        assert!(matches!(
            shortest_distance(&f, ShortestPathAlgo::Acyclic),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            shortest_distance(&f, ShortestPathAlgo::Dijkstra),
            Err(Error::Contract(_))
        ));
        assert_eq!(
            shortest_distance(&f, ShortestPathAlgo::BellmanFord).unwrap()[1],
            Weight(-1.0)
        );
        f.add_arc(1, Arc::acceptor(1, Weight(0.0), 0));
        assert!(shortest_distance(&f, ShortestPathAlgo::BellmanFord).is_err());
    }

    #[test]
    fn parallel_improvements_are_not_a_negative_cycle() {
        let mut f = Fst::new(Semiring::Tropical);
        f.add_states(2);
        f.set_start(0);
        for w in (0..10).rev() {
            f.add_arc(0, Arc::acceptor(1, Weight(w as f64), 1));
        }
        assert_eq!(
            shortest_distance(&f, ShortestPathAlgo::BellmanFord).unwrap()[1],
            Weight(0.0)
        );
    }

    #[test]
    fn best_path_and_empty_language() {
        let f = Fst::linear_transducer(Semiring::Tropical, &[1, 2], &[3]);
        let p = best_path(&f).unwrap();
        assert_eq!((p.input, p.output, p.weight), (vec![1, 2], vec![3], Weight(0.0)));
        let mut e = Fst::new(Semiring::Tropical);
        e.add_state();
        e.set_start(0);
        assert!(matches!(best_path(&e), Err(Error::NoPath)));
    }
}
