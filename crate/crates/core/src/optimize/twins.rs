//! Twin-property test.
//!
//! Two states reachable by a common input string are twins when every input
//! cycle they share carries the same weight at both (and, for transducers,
//! leaves the output delay between them unchanged). A machine with
//! the property determinizes in finitely many subset states.
//!
//! The test walks the square machine whose states pair up such states,
//! tracking for transducers the output delay between the two runs. An arc
//! of the square is weighted by the difference of its two component
//! weights; the property holds iff every cycle of the square sums to zero,
//! which is checked per strongly connected component with potentials.

use std::collections::{HashMap, VecDeque};

use super::epsilon::rm_epsilon;
use super::seq::lcp_len;
use crate::error::{Error, Result};
use crate::fst::{connect, Fst, Label, StateId, EPSILON};
use crate::semiring::{Semiring, Weight};

#[derive(Debug, Clone, PartialEq)]
pub struct TwinWitness {
    /// States (of the ε-free, trimmed machine) carrying the offending cycle.
    pub states: (StateId, StateId),
    /// Input string of the common cycle.
    pub cycle: Vec<Label>,
    /// Cycle weight at each state.
    pub weights: (Weight, Weight),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwinReport {
    pub has_twin_property: bool,
    pub witness: Option<TwinWitness>,
}

impl TwinReport {
    fn holds() -> Self {
        TwinReport {
            has_twin_property: true,
            witness: None,
        }
    }

    fn fails(w: TwinWitness) -> Self {
        TwinReport {
            has_twin_property: false,
            witness: Some(w),
        }
    }
}

/// Square state: both components plus the output each run has produced
/// beyond their common prefix.
type Node = (StateId, StateId, Vec<Label>, Vec<Label>);

struct Edge {
    to: usize,
    label: Label,
    w1: Weight,
    w2: Weight,
}

struct Square {
    nodes: Vec<Node>,
    edges: Vec<Vec<Edge>>,
    parent: Vec<Option<(usize, Label, Weight, Weight)>>,
}

pub fn twins_test(fst: &Fst) -> Result<TwinReport> {
    let kind = fst.semiring();
    if kind == Semiring::Real {
        return Err(Error::UnsupportedKind { op: "twins test", kind });
    }
    let m = connect(&rm_epsilon(fst)?);
    let Some(start) = m.start() else {
        return Ok(TwinReport::holds());
    };
    let acceptor = m.is_acceptor();
    if !acceptor && m.states().any(|q| m.arcs(q).iter().any(|a| a.ilabel == EPSILON)) {
        return Err(Error::Unsupported(
            "twins test needs a transducer without input-ε arcs".into(),
        ));
    }
    let n = m.num_states();
    let delay_cap = n * n + 1;

    let mut sq = Square {
        nodes: Vec::new(),
        edges: Vec::new(),
        parent: Vec::new(),
    };
    let mut ids: HashMap<Node, usize> = HashMap::new();
    let root: Node = (start, start, Vec::new(), Vec::new());
    ids.insert(root.clone(), 0);
    sq.nodes.push(root);
    sq.edges.push(Vec::new());
    sq.parent.push(None);
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        let (q1, q2, d1, d2) = sq.nodes[u].clone();
        for a1 in m.arcs(q1) {
            for a2 in m.arcs(q2).iter().filter(|a| a.ilabel == a1.ilabel) {
                let (mut e1, mut e2) = (d1.clone(), d2.clone());
                if !acceptor {
                    if a1.olabel != EPSILON {
                        e1.push(a1.olabel);
                    }
                    if a2.olabel != EPSILON {
                        e2.push(a2.olabel);
                    }
                    let k = lcp_len(&e1, &e2);
                    e1.drain(..k);
                    e2.drain(..k);
                }
                let node: Node = (a1.nextstate, a2.nextstate, e1, e2);
                let too_long = node.2.len() + node.3.len() > delay_cap;
                let v = match ids.get(&node) {
                    Some(&v) => v,
                    None => {
                        let v = sq.nodes.len();
                        ids.insert(node.clone(), v);
                        sq.nodes.push(node);
                        sq.edges.push(Vec::new());
                        sq.parent.push(Some((u, a1.ilabel, a1.weight, a2.weight)));
                        if too_long {
                            return Ok(TwinReport::fails(delay_witness(&sq, v)));
                        }
                        queue.push_back(v);
                        v
                    }
                };
                sq.edges[u].push(Edge {
                    to: v,
                    label: a1.ilabel,
                    w1: a1.weight,
                    w2: a2.weight,
                });
            }
        }
    }
    if kind == Semiring::Boolean {
        return Ok(TwinReport::holds());
    }
    Ok(match cycle_check(&sq) {
        Some(w) => TwinReport::fails(w),
        None => TwinReport::holds(),
    })
}

/// Walks parents from `v` back to the root and returns the first stretch
/// between two visits of the same state pair.
fn delay_witness(sq: &Square, v: usize) -> TwinWitness {
    let mut chain = Vec::new();
    let mut cur = v;
    while let Some((p, l, w1, w2)) = sq.parent[cur] {
        chain.push((cur, l, w1, w2));
        cur = p;
    }
    chain.push((cur, EPSILON, Weight(0.0), Weight(0.0)));
    chain.reverse();
    let pair = |i: usize| (sq.nodes[chain[i].0].0, sq.nodes[chain[i].0].1);
    for j in 1..chain.len() {
        for i in 0..j {
            if pair(i) == pair(j) {
                let seg = &chain[i + 1..=j];
                let cycle = seg.iter().map(|c| c.1).collect();
                let w1 = seg.iter().fold(0.0, |s, c| s + c.2 .0);
                let w2 = seg.iter().fold(0.0, |s, c| s + c.3 .0);
                return TwinWitness {
                    states: pair(i),
                    cycle,
                    weights: (Weight(w1), Weight(w2)),
                };
            }
        }
    }
    TwinWitness {
        states: pair(0),
        cycle: Vec::new(),
        weights: (Weight(0.0), Weight(0.0)),
    }
}

/// Strongly connected components (iterative Tarjan).
fn sccs(edges: &[Vec<Edge>]) -> Vec<usize> {
    let n = edges.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut comp = vec![usize::MAX; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < edges[v].len() {
                let w = edges[v][*i].to;
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

const DELTA: f64 = 1e-9;

/// Looks for a square cycle whose two component weights differ.
fn cycle_check(sq: &Square) -> Option<TwinWitness> {
    let comp = sccs(&sq.edges);
    let n = sq.nodes.len();
    let mut done = vec![false; n];
    for r in 0..n {
        if done[comp[r]] {
            continue;
        }
        done[comp[r]] = true;
        let c = comp[r];
        // Out-tree from r inside the component: potentials and paths.
        let mut pot: Vec<Option<f64>> = vec![None; n];
        let mut tree: Vec<Option<(usize, usize)>> = vec![None; n];
        pot[r] = Some(0.0);
        let mut queue = VecDeque::from([r]);
        while let Some(u) = queue.pop_front() {
            for (k, e) in sq.edges[u].iter().enumerate() {
                if comp[e.to] == c && pot[e.to].is_none() {
                    pot[e.to] = Some(pot[u].unwrap() + e.w1.0 - e.w2.0);
                    tree[e.to] = Some((u, k));
                    queue.push_back(e.to);
                }
            }
        }
        for u in 0..n {
            if comp[u] != c {
                continue;
            }
            for (k, e) in sq.edges[u].iter().enumerate() {
                if comp[e.to] != c {
                    continue;
                }
                let lhs = pot[u].unwrap() + e.w1.0 - e.w2.0;
                if (lhs - pot[e.to].unwrap()).abs() > DELTA {
                    return Some(closed_walk(sq, &comp, &tree, r, u, k));
                }
            }
        }
    }
    None
}

/// Closed walk r ⇝ u, the edge `k` out of `u`, then back to r.
fn closed_walk(
    sq: &Square,
    comp: &[usize],
    tree: &[Option<(usize, usize)>],
    r: usize,
    u: usize,
    k: usize,
) -> TwinWitness {
    let mut steps: Vec<(usize, usize)> = Vec::new();
    let mut cur = u;
    while cur != r {
        let (p, kk) = tree[cur].expect("tree path");
        steps.push((p, kk));
        cur = p;
    }
    steps.reverse();
    steps.push((u, k));
    // Breadth-first path back to r inside the component.
    let c = comp[r];
    let from = sq.edges[u][k].to;
    let mut back: HashMap<usize, (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = vec![false; sq.nodes.len()];
    seen[from] = true;
    while let Some(x) = queue.pop_front() {
        if x == r {
            break;
        }
        for (kk, e) in sq.edges[x].iter().enumerate() {
            if comp[e.to] == c && !seen[e.to] {
                seen[e.to] = true;
                back.insert(e.to, (x, kk));
                queue.push_back(e.to);
            }
        }
    }
    let mut tail = Vec::new();
    let mut cur = r;
    while cur != from {
        let (p, kk) = back[&cur];
        tail.push((p, kk));
        cur = p;
    }
    tail.reverse();
    steps.extend(tail);
    let mut cycle = Vec::new();
    let (mut w1, mut w2) = (0.0, 0.0);
    for (x, kk) in steps {
        let e = &sq.edges[x][kk];
        cycle.push(e.label);
        w1 += e.w1.0;
        w2 += e.w2.0;
    }
    let node = &sq.nodes[r];
    TwinWitness {
        states: (node.0, node.1),
        cycle,
        weights: (Weight(w1), Weight(w2)),
    }
}
