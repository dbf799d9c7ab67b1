use super::shortest::{best_path, shortest_distance, shortest_distance_to_final, Path, ShortestPathAlgo};
use crate::error::{Error, Result};
use crate::fst::{connect, Fst};
use crate::ops::compose;

const SLACK: f64 = 1e-9;

/// Keeps the states and arcs of an acyclic machine that lie on some
/// accepting path costing at most `best + threshold`.
pub fn lattice_prune(lattice: &Fst, threshold: f64) -> Result<Fst> {
    if !lattice.is_acyclic() {
        return Err(Error::Contract("lattice pruning needs an acyclic machine".into()));
    }
    let alpha = shortest_distance(lattice, ShortestPathAlgo::Acyclic)?;
    let beta = shortest_distance_to_final(lattice)?;
    let Some(start) = lattice.start() else {
        return Ok(lattice.clone());
    };
    let best = beta[start].0 + lattice.start_weight().0;
    if !best.is_finite() {
        return Ok(connect(lattice));
    }
    let limit = best + threshold + SLACK * best.abs().max(1.0);
    let mut out = lattice.clone();
    let kind = lattice.semiring();
    for q in out.states() {
        let a = alpha[q].0;
        out.arcs_mut(q)
            .retain(|arc| a + arc.weight.0 + beta[arc.nextstate].0 <= limit);
        if out.is_final(q) && a + out.final_weight(q).0 > limit {
            out.set_final(q, kind.zero());
        }
    }
    Ok(connect(&out))
}

/// Best path of `lattice ∘ full`.
pub fn rescore(lattice: &Fst, full: &Fst) -> Result<Path> {
    let c = compose(lattice, full)?;
    best_path(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::Arc;
    use crate::semiring::{Semiring, Weight};

    fn diamond() -> Fst {
        let mut f = Fst::new(Semiring::Tropical);
        f.add_states(4);
        f.set_start(0);
        f.add_arc(0, Arc::acceptor(1, Weight(1.0), 1));
        f.add_arc(0, Arc::acceptor(2, Weight(2.0), 2));
        f.add_arc(1, Arc::acceptor(3, Weight(1.0), 3));
        f.add_arc(2, Arc::acceptor(3, Weight(1.0), 3));
        f.set_final(3, Weight(0.0));
        f
    }

    #[test]
    fn zero_threshold_keeps_best_only() {
        let p = lattice_prune(&diamond(), 0.0).unwrap();
        assert_eq!(p.num_states(), 3);
        let all = lattice_prune(&diamond(), f64::INFINITY).unwrap();
        assert_eq!(all.num_arcs(), 4);
    }

    #[test]
    fn rescoring_can_flip_the_winner() {
        let mut full = Fst::sigma_star(Semiring::Tropical, &[3]);
        full.add_arc(0, Arc::acceptor(1, Weight(5.0), 0));
        full.add_arc(0, Arc::acceptor(2, Weight(0.0), 0));
        let p = rescore(&diamond(), &full).unwrap();
        assert_eq!(p.input, vec![2, 3]);
        assert_eq!(p.weight, Weight(3.0));
    }
}
