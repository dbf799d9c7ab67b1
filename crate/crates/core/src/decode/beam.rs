//! Frame-synchronous beam search over a lazily composed cascade.
//!
//! The observation machine must be a linear chain, so every composed state
//! has consumed a definite number of observations: its frame. States of one
//! frame are comparable; after the ε moves of a frame settle, any state
//! costing more than the frame's best plus `beam` is dropped. An infinite
//! beam keeps everything and the search returns the exact best path.
//!
//! Widening the beam is not guaranteed to help. A wider beam can admit a
//! cheaper state that lowers the frame's best cost, and the tighter
//! threshold then drops a state the narrower beam would have kept.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::fst::{Fst, Label, StateId, StateMachine, EPSILON};
use crate::lazy::LazyCompose;
use crate::semiring::{Semiring, Weight};

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    /// Non-ε output labels of the best surviving path.
    pub output: Vec<Label>,
    pub weight: Weight,
    /// Composed states whose arcs were computed.
    pub expanded: usize,
}

struct Token {
    cost: f64,
    prev: Option<usize>,
    olabel: Label,
}

/// Whether `o` is a single-path ε-free acceptor.
fn is_chain(o: &Fst) -> bool {
    let Some(mut s) = o.start() else { return false };
    let mut seen = 0;
    loop {
        let arcs = o.arcs(s);
        match arcs {
            [] => return o.is_final(s),
            [a] if a.ilabel != EPSILON && !o.is_final(s) => {
                s = a.nextstate;
                seen += 1;
                if seen > o.num_states() {
                    return false;
                }
            }
            _ => return false,
        }
    }
}

type Inner<'a> = Box<dyn StateMachine + 'a>;

/// Decodes `observation` through `stages` (applied left to right).
pub fn beam_decode(observation: &Fst, stages: &[Fst], beam: f64) -> Result<Decoded> {
    if observation.semiring() != Semiring::Tropical {
        return Err(Error::UnsupportedKind {
            op: "beam decode",
            kind: observation.semiring(),
        });
    }
    if !is_chain(observation) {
        return Err(Error::Contract("observation stage must be a linear chain".into()));
    }
    let Some((last, inner_stages)) = stages.split_last() else {
        return Err(Error::Contract(
            "cascade needs at least one stage after the observations".into(),
        ));
    };
    let mut inner: Inner<'_> = Box::new(observation);
    for s in inner_stages {
        inner = Box::new(LazyCompose::new(inner, s)?);
    }
    let mut m = LazyCompose::new(inner, last)?;
    let frames = observation.num_states() - 1;
    search(&mut m, frames, beam)
}

fn search<M: StateMachine>(m: &mut LazyCompose<M, &Fst>, frames: usize, beam: f64) -> Result<Decoded> {
    let start = m.start().ok_or(Error::BeamExhausted)?;
    let mut tokens: Vec<Token> = vec![Token {
        cost: m.start_weight().0,
        prev: None,
        olabel: EPSILON,
    }];
    let mut frontier: BTreeMap<StateId, usize> = BTreeMap::from([(start, 0)]);
    for t in 0..=frames {
        // Settle ε moves inside the frame.
        let mut best = frontier.values().map(|&k| tokens[k].cost).fold(f64::INFINITY, f64::min);
        let mut queue: VecDeque<StateId> = frontier.keys().copied().collect();
        while let Some(s) = queue.pop_front() {
            let tok = frontier[&s];
            let cost = tokens[tok].cost;
            if cost > best + beam {
                continue;
            }
            let arcs: Vec<_> = m.arcs(s).iter().filter(|a| a.ilabel == EPSILON).copied().collect();
            for a in arcs {
                let nc = cost + a.weight.0;
                if frontier.get(&a.nextstate).is_none_or(|&k| nc < tokens[k].cost) {
                    tokens.push(Token {
                        cost: nc,
                        prev: Some(tok),
                        olabel: a.olabel,
                    });
                    frontier.insert(a.nextstate, tokens.len() - 1);
                    best = best.min(nc);
                    queue.push_back(a.nextstate);
                }
            }
        }
        frontier.retain(|_, k| tokens[*k].cost <= best + beam);
        if t == frames {
            break;
        }
        let mut next: BTreeMap<StateId, usize> = BTreeMap::new();
        for (&s, &tok) in &frontier {
            let cost = tokens[tok].cost;
            let arcs: Vec<_> = m.arcs(s).iter().filter(|a| a.ilabel != EPSILON).copied().collect();
            for a in arcs {
                let nc = cost + a.weight.0;
                if next.get(&a.nextstate).is_none_or(|&k| nc < tokens[k].cost) {
                    tokens.push(Token {
                        cost: nc,
                        prev: Some(tok),
                        olabel: a.olabel,
                    });
                    next.insert(a.nextstate, tokens.len() - 1);
                }
            }
        }
        if next.is_empty() {
            return Err(Error::BeamExhausted);
        }
        frontier = next;
    }
    let mut best: Option<(f64, usize)> = None;
    let finals: Vec<(StateId, usize)> = frontier.iter().map(|(&s, &k)| (s, k)).collect();
    for (s, tok) in finals {
        let total = tokens[tok].cost + m.final_weight(s).0;
        if total.is_finite() && best.is_none_or(|(b, _)| total < b) {
            best = Some((total, tok));
        }
    }
    let (weight, mut tok) = best.ok_or(Error::BeamExhausted)?;
    let mut output = Vec::new();
    loop {
        let t = &tokens[tok];
        if t.olabel != EPSILON {
            output.push(t.olabel);
        }
        match t.prev {
            Some(p) => tok = p,
            None => break,
        }
    }
    output.reverse();
    Ok(Decoded {
        output,
        weight: Weight(weight),
        expanded: m.expanded(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::Arc;

    const T: Semiring = Semiring::Tropical;

    /// Maps observation 1 to word 10 (cost 1) or 11 (cost 2), then word 11 is
    /// cheap in the next stage.
    fn cascade() -> Vec<Fst> {
        let mut a = Fst::new(T);
        a.add_states(1);
        a.set_start(0);
        a.set_final(0, Weight(0.0));
        a.add_arc(0, Arc::new(1, 10, Weight(1.0), 0));
        a.add_arc(0, Arc::new(1, 11, Weight(2.0), 0));
        let mut lm = Fst::new(T);
        lm.add_states(1);
        lm.set_start(0);
        lm.set_final(0, Weight(0.0));
        lm.add_arc(0, Arc::new(10, 10, Weight(5.0), 0));
        lm.add_arc(0, Arc::new(11, 11, Weight(0.0), 0));
        vec![a, lm]
    }

    #[test]
    fn infinite_beam_is_exact() {
        let o = Fst::linear(T, &[1, 1]);
        let d = beam_decode(&o, &cascade(), f64::INFINITY).unwrap();
        assert_eq!(d.output, vec![11, 11]);
        assert_eq!(d.weight, Weight(4.0));
    }

    #[test]
    fn tight_beam_can_lose_the_best_path() {
        let o = Fst::linear(T, &[1, 1]);
        let stages = cascade();
        // The first stage alone prefers 10; composing with the LM makes it
        // expensive only after the arc is taken, so frame costs include it.
        let d = beam_decode(&o, &stages, 0.0).unwrap();
        assert!(d.weight.0 >= 4.0);
        assert!(matches!(
            beam_decode(&Fst::linear(T, &[2]), &stages, 1.0),
            Err(Error::BeamExhausted)
        ));
    }

    #[test]
    fn wider_beam_can_do_worse() {
        // Frame 1 keeps a (0) and maybe b (0.8); b leads to a cheap dead end
        // in frame 2 that pushes c (2) out of a beam of 1.
        let mut g = Fst::new(T);
        g.add_states(6);
        g.set_start(0);
        g.add_arc(0, Arc::acceptor(1, Weight(0.0), 1));
        g.add_arc(0, Arc::acceptor(1, Weight(0.8), 2));
        g.add_arc(1, Arc::acceptor(1, Weight(2.0), 3));
        g.add_arc(2, Arc::acceptor(1, Weight(0.0), 4));
        g.add_arc(3, Arc::acceptor(1, Weight(0.0), 5));
        g.set_final(5, Weight(0.0));
        let o = Fst::linear(T, &[1, 1, 1]);
        let stages = [g];
        assert_eq!(beam_decode(&o, &stages, 0.5).unwrap().weight, Weight(2.0));
        assert!(matches!(beam_decode(&o, &stages, 1.0), Err(Error::BeamExhausted)));
        assert_eq!(beam_decode(&o, &stages, f64::INFINITY).unwrap().weight, Weight(2.0));
    }

    #[test]
    fn observation_must_be_a_chain() {
        let o = Fst::sigma_star(T, &[1]);
        assert!(matches!(beam_decode(&o, &cascade(), 1.0), Err(Error::Contract(_))));
    }
}
