//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::rngs::StdRng;
use rand::Rng;
use wfst::fst::{connect, enumerate_relation, Arc, Relation};
use wfst::{Fst, Label, Semiring, Weight, EPSILON};

/// Random machine with `states` states over labels `1..=sigma`, integer
/// weights in `0..=max_w` (tropical) or small dyadic weights (real).
pub fn random_fst(
    rng: &mut StdRng,
    kind: Semiring,
    states: usize,
    sigma: u32,
    arcs: usize,
    eps: bool,
    acceptor: bool,
) -> Fst {
    let mut f = Fst::new(kind);
    f.add_states(states);
    f.set_start(0);
    let low = if eps { 0 } else { 1 };
    for _ in 0..arcs {
        let from = rng.gen_range(0..states);
        let to = rng.gen_range(0..states);
        let i = rng.gen_range(low..=sigma);
        let o = if acceptor { i } else { rng.gen_range(low..=sigma) };
        f.add_arc(from, Arc::new(i, o, random_weight(rng, kind), to));
    }
    for q in 0..states {
        if rng.gen_bool(0.4) || q == states - 1 {
            f.set_final(q, random_weight(rng, kind));
        }
    }
    f
}

pub fn random_weight(rng: &mut StdRng, kind: Semiring) -> Weight {
    match kind {
        Semiring::Boolean => Weight(1.0),
        Semiring::Tropical => Weight(rng.gen_range(0..=5) as f64),
        Semiring::Real => Weight(rng.gen_range(1..=4) as f64 / 8.0),
    }
}

/// Every string over `1..=sigma` of length at most `n`.
pub fn all_strings(sigma: u32, n: usize) -> Vec<Vec<Label>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<Label>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for s in &layer {
            for l in 1..=sigma {
                let mut t = s.clone();
                t.push(l);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Finite-language rewrite rule used by the scanning oracle.
#[derive(Debug, Clone)]
pub struct FiniteRule {
    pub phi: Vec<Vec<Label>>,
    pub psi: Vec<(Vec<Label>, f64)>,
    pub lambda: Vec<Vec<Label>>,
    pub rho: Vec<Vec<Label>>,
}

/// Obligatory left-to-right rewriting by direct scanning. The left context
/// is tested on the output produced so far, the right context on the input
/// after the match. Returns every output with its best (minimum) weight.
pub fn rewrite_oracle(rule: &FiniteRule, input: &[Label]) -> BTreeMap<Vec<Label>, f64> {
    let mut out = BTreeMap::new();
    scan(rule, input, 0, &mut Vec::new(), 0.0, &mut out);
    out
}

fn scan(rule: &FiniteRule, x: &[Label], p: usize, y: &mut Vec<Label>, w: f64, out: &mut BTreeMap<Vec<Label>, f64>) {
    if p == x.len() {
        let e = out.entry(y.clone()).or_insert(f64::INFINITY);
        *e = e.min(w);
        return;
    }
    let left_ok = rule.lambda.iter().any(|l| y.ends_with(l));
    let mut sites: Vec<usize> = rule
        .phi
        .iter()
        .filter(|f| x[p..].starts_with(f))
        .map(|f| p + f.len())
        .filter(|&j| rule.rho.iter().any(|r| x[j..].starts_with(r)))
        .collect();
    sites.sort_unstable();
    sites.dedup();
    if left_ok && !sites.is_empty() {
        for j in sites {
            for (z, wz) in &rule.psi {
                let keep = y.len();
                y.extend_from_slice(z);
                scan(rule, x, j, y, w + wz, out);
                y.truncate(keep);
            }
        }
    } else {
        y.push(x[p]);
        scan(rule, x, p + 1, y, w, out);
        y.pop();
    }
}

/// Regex text for a finite language over the one-letter symbols `a`, `b`, ...
pub fn finite_regex(lang: &[Vec<Label>]) -> String {
    let alts: Vec<String> = lang
        .iter()
        .map(|s| if s.is_empty() { "()".to_string() } else { letters(s) })
        .collect();
    format!("({})", alts.join("|"))
}

pub fn letters(s: &[Label]) -> String {
    s.iter().map(|&l| (b'a' + (l - 1) as u8) as char).collect()
}

pub fn random_string(rng: &mut StdRng, sigma: u32, min: usize, max: usize) -> Vec<Label> {
    let n = rng.gen_range(min..=max);
    (0..n).map(|_| rng.gen_range(1..=sigma)).collect()
}

/// A random rule over `sigma` one-letter symbols with patterns and contexts
/// of at most three symbols. Replacement strings avoid the pattern's symbols.
pub fn random_rule(rng: &mut StdRng, sigma: u32) -> FiniteRule {
    let phi: Vec<Vec<Label>> = (0..rng.gen_range(1..=2))
        .map(|_| random_string(rng, sigma, 1, 3))
        .collect();
    let used: Vec<Label> = phi.iter().flatten().copied().collect();
    let free: Vec<Label> = (1..=sigma).filter(|l| !used.contains(l)).collect();
    let psi = (0..rng.gen_range(1..=2))
        .map(|_| {
            let n = rng.gen_range(0..=2);
            let s: Vec<Label> = if free.is_empty() {
                Vec::new()
            } else {
                (0..n).map(|_| free[rng.gen_range(0..free.len())]).collect()
            };
            (s, rng.gen_range(0..=3) as f64)
        })
        .collect();
    let ctx = |rng: &mut StdRng| -> Vec<Vec<Label>> {
        (0..rng.gen_range(1..=2))
            .map(|_| random_string(rng, sigma, 0, 3))
            .collect()
    };
    let lambda = ctx(rng);
    let rho = ctx(rng);
    FiniteRule { phi, psi, lambda, rho }
}

/// Rule-file text for a finite rule.
pub fn rule_text(rule: &FiniteRule) -> String {
    let psi: Vec<String> = rule
        .psi
        .iter()
        .map(|(s, w)| format!("<{w}>{}", if s.is_empty() { "()".to_string() } else { letters(s) }))
        .collect();
    format!(
        "{} -> {} / {} _ {} ;",
        finite_regex(&rule.phi),
        psi.join(" | "),
        finite_regex(&rule.lambda),
        finite_regex(&rule.rho)
    )
}

/// `⊕_v A(u,v) ⊗ B(v,w)` for every `|u|, |w| <= max`, joining the two
/// enumerated relations on the middle string. Exact as long as no pair
/// within the bound needs a middle string longer than `max`.
pub fn compose_oracle(a: &Fst, b: &Fst, max: usize) -> Relation {
    let kind = a.semiring();
    let ra = enumerate_relation(a, max, max).unwrap();
    let mut by_middle: BTreeMap<&[Label], BTreeMap<Vec<Label>, Weight>> = BTreeMap::new();
    for (_, v) in ra.keys() {
        by_middle.entry(v.as_slice()).or_insert_with(|| outputs_on(b, v, max));
    }
    let mut out = Relation::new();
    for ((u, v), x) in &ra {
        for (w, y) in &by_middle[v.as_slice()] {
            let e = out.entry((u.clone(), w.clone())).or_insert(kind.zero());
            *e = kind.plus(*e, kind.times(*x, *y));
        }
    }
    out.retain(|_, w| !kind.is_zero(*w));
    out
}

/// Outputs of length at most `max_out` that `f` writes while reading exactly
/// `input`, with their weights. Idempotent semirings relax
/// `(state, position, output)` configurations; the real semiring sums over
/// every path and expects no ε cycles.
pub fn outputs_on(f: &Fst, input: &[Label], max_out: usize) -> BTreeMap<Vec<Label>, Weight> {
    let kind = f.semiring();
    let mut out = BTreeMap::new();
    let Some(start) = f.start() else { return out };
    let add = |out: &mut BTreeMap<Vec<Label>, Weight>, o: &[Label], w: Weight| {
        let e = out.entry(o.to_vec()).or_insert(kind.zero());
        *e = kind.plus(*e, w);
    };
    let step = |q: usize, pos: usize, obuf: &[Label]| -> Vec<(usize, usize, Vec<Label>, Weight)> {
        f.arcs(q)
            .iter()
            .filter_map(|a| {
                let np = if a.ilabel == EPSILON {
                    pos
                } else if input.get(pos) == Some(&a.ilabel) {
                    pos + 1
                } else {
                    return None;
                };
                let mut no = obuf.to_vec();
                if a.olabel != EPSILON {
                    if no.len() == max_out {
                        return None;
                    }
                    no.push(a.olabel);
                }
                Some((a.nextstate, np, no, a.weight))
            })
            .collect()
    };
    if kind.is_idempotent() {
        let mut best: HashMap<(usize, usize, Vec<Label>), Weight> = HashMap::new();
        let first = (start, 0, Vec::new());
        best.insert(first.clone(), f.start_weight());
        let mut queue = VecDeque::from([first]);
        while let Some(cfg) = queue.pop_front() {
            let w = best[&cfg];
            for (q, p, o, x) in step(cfg.0, cfg.1, &cfg.2) {
                let nw = kind.times(w, x);
                let key = (q, p, o);
                let old = best.get(&key).copied().unwrap_or(kind.zero());
                if kind.plus(old, nw) != old {
                    best.insert(key.clone(), kind.plus(old, nw));
                    queue.push_back(key);
                }
            }
        }
        for ((q, p, o), w) in best {
            if p == input.len() && f.is_final(q) {
                add(&mut out, &o, kind.times(w, f.final_weight(q)));
            }
        }
    } else {
        let mut stack = vec![(start, 0, Vec::new(), f.start_weight(), 0)];
        while let Some((q, p, o, w, depth)) = stack.pop() {
            assert!(depth <= 64, "path too long for the real-semiring oracle");
            if p == input.len() && f.is_final(q) {
                add(&mut out, &o, kind.times(w, f.final_weight(q)));
            }
            for (nq, np, no, x) in step(q, p, &o) {
                stack.push((nq, np, no, kind.times(w, x), depth + 1));
            }
        }
    }
    out.retain(|_, w| !kind.is_zero(*w));
    out
}

/// Random transducer whose output never outruns its input: no arc reads ε
/// while writing a symbol, so `|v| <= |u|` on every path.
pub fn random_input_bounded(rng: &mut StdRng, kind: Semiring, states: usize, sigma: u32, arcs: usize) -> Fst {
    let mut f = random_fst(rng, kind, states, sigma, arcs, true, false);
    for q in f.states() {
        for a in f.arcs_mut(q) {
            if a.ilabel == EPSILON && a.olabel != EPSILON {
                a.ilabel = a.olabel;
            }
        }
    }
    f
}

/// Random acyclic machine: arcs only go from lower to higher state ids.
pub fn random_dag(rng: &mut StdRng, kind: Semiring, states: usize, sigma: u32, arcs: usize, eps: bool) -> Fst {
    let mut f = Fst::new(kind);
    f.add_states(states);
    f.set_start(0);
    let low = if eps { 0 } else { 1 };
    for _ in 0..arcs {
        let from = rng.gen_range(0..states - 1);
        let to = rng.gen_range(from + 1..states);
        let i = rng.gen_range(low..=sigma);
        let o = rng.gen_range(low..=sigma);
        f.add_arc(from, Arc::new(i, o, random_weight(rng, kind), to));
    }
    for q in 0..states {
        if rng.gen_bool(0.3) || q == states - 1 {
            f.set_final(q, random_weight(rng, kind));
        }
    }
    f
}

/// Best tropical distance from the start to every state of an acyclic
/// machine, by walking every path.
pub fn path_distances(f: &Fst) -> Vec<f64> {
    fn walk(f: &Fst, q: usize, acc: f64, best: &mut [f64]) {
        best[q] = best[q].min(acc);
        for a in f.arcs(q) {
            walk(f, a.nextstate, acc + a.weight.0, best);
        }
    }
    let mut best = vec![f64::INFINITY; f.num_states()];
    if let Some(s) = f.start() {
        walk(f, s, f.start_weight().0, &mut best);
    }
    best
}

/// Random deterministic machine: each state has at most one arc per label.
pub fn random_deterministic(rng: &mut StdRng, kind: Semiring, states: usize, sigma: u32) -> Fst {
    let mut f = Fst::new(kind);
    f.add_states(states);
    f.set_start(0);
    for q in 0..states {
        for l in 1..=sigma {
            if rng.gen_bool(0.75) {
                let to = rng.gen_range(0..states);
                f.add_arc(q, Arc::acceptor(l, random_weight(rng, kind), to));
            }
        }
        if rng.gen_bool(0.4) {
            f.set_final(q, random_weight(rng, kind));
        }
    }
    f
}

/// Number of Myhill–Nerode classes among the useful states of a
/// deterministic acceptor with non-negative weights. Two states are merged
/// when their residual weight functions differ by a constant; residuals are
/// compared on every string of length at most `len`, which must be at least
/// the state count.
pub fn myhill_nerode_classes(f: &Fst, len: usize) -> usize {
    let trimmed = connect(f);
    let mut signatures: Vec<Vec<(Vec<Label>, f64)>> = Vec::new();
    for q in trimmed.states() {
        let mut from_q = trimmed.clone();
        from_q.set_start(q);
        from_q.set_start_weight(trimmed.semiring().one());
        let rel = enumerate_relation(&from_q, len, len).unwrap();
        let shift = match trimmed.semiring() {
            Semiring::Tropical => rel.values().map(|w| w.0).fold(f64::INFINITY, f64::min),
            _ => 0.0,
        };
        let sig: Vec<(Vec<Label>, f64)> = rel.into_iter().map(|((i, _), w)| (i, w.0 - shift)).collect();
        if !signatures.contains(&sig) {
            signatures.push(sig);
        }
    }
    signatures.len()
}
