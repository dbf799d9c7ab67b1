use crate::error::{Error, Result};
use crate::fst::{Arc, Fst, Label, StateId, EPSILON};
use crate::semiring::Semiring;

use super::compose::check_kinds;

/// Copies every state of `src` into `dst`, returning the id offset.
fn append_states(dst: &mut Fst, src: &Fst) -> StateId {
    let base = dst.num_states();
    dst.add_states(src.num_states());
    for s in src.states() {
        dst.set_final(base + s, src.final_weight(s));
        for a in src.arcs(s) {
            dst.add_arc(
                base + s,
                Arc {
                    nextstate: base + a.nextstate,
                    ..*a
                },
            );
        }
    }
    base
}

fn first_symbols(out: &mut Fst, a: &Fst, b: &Fst) {
    out.set_isymbols(a.isymbols().or(b.isymbols()).cloned());
    out.set_osymbols(a.osymbols().or(b.osymbols()).cloned());
}

/// `x ↦ A(x) ⊕ B(x)` through a fresh start state with ε arcs.
pub fn union(a: &Fst, b: &Fst) -> Result<Fst> {
    let kind = check_kinds(a, b)?;
    let mut out = Fst::new(kind);
    first_symbols(&mut out, a, b);
    let start = out.add_state();
    out.set_start(start);
    for m in [a, b] {
        let base = append_states(&mut out, m);
        if let Some(s) = m.start() {
            out.add_arc(start, Arc::new(EPSILON, EPSILON, m.start_weight(), base + s));
        }
    }
    Ok(out)
}

/// `w ↦ ⊕_{uv = w} A(u) ⊗ B(v)`.
pub fn concat(a: &Fst, b: &Fst) -> Result<Fst> {
    let kind = check_kinds(a, b)?;
    let mut out = Fst::new(kind);
    first_symbols(&mut out, a, b);
    let Some(sa) = a.start() else {
        return Ok(out);
    };
    append_states(&mut out, a);
    out.set_start(sa);
    out.set_start_weight(a.start_weight());
    let base = append_states(&mut out, b);
    for q in a.states() {
        if !a.is_final(q) {
            continue;
        }
        out.set_final(q, kind.zero());
        if let Some(sb) = b.start() {
            let w = kind.times(a.final_weight(q), b.start_weight());
            out.add_arc(q, Arc::new(EPSILON, EPSILON, w, base + sb));
        }
    }
    Ok(out)
}

/// Kleene star. The new start state is final with weight one; every final
/// state of `A` loops back to it with an ε arc carrying its final weight.
pub fn closure(a: &Fst) -> Result<Fst> {
    let kind = a.semiring();
    if kind == Semiring::Real {
        return Err(Error::UnsupportedKind { op: "closure", kind });
    }
    let mut out = Fst::new(kind);
    out.copy_symbols(a);
    let start = out.add_state();
    out.set_start(start);
    out.set_final(start, kind.one());
    let base = append_states(&mut out, a);
    if let Some(s) = a.start() {
        out.add_arc(start, Arc::new(EPSILON, EPSILON, a.start_weight(), base + s));
    }
    for q in a.states() {
        if a.is_final(q) {
            out.set_final(base + q, kind.zero());
            out.add_arc(base + q, Arc::new(EPSILON, EPSILON, a.final_weight(q), start));
        }
    }
    Ok(out)
}

/// Reverses every path: `(u, v) ↦ A(rev u, rev v)`.
pub fn reverse(a: &Fst) -> Fst {
    let kind = a.semiring();
    let mut out = Fst::new(kind);
    out.copy_symbols(a);
    let Some(sa) = a.start() else {
        return out;
    };
    let start = out.add_state();
    out.add_states(a.num_states());
    out.set_start(start);
    for q in a.states() {
        if a.is_final(q) {
            out.add_arc(start, Arc::new(EPSILON, EPSILON, a.final_weight(q), q + 1));
        }
        for arc in a.arcs(q) {
            out.add_arc(
                arc.nextstate + 1,
                Arc {
                    nextstate: q + 1,
                    ..*arc
                },
            );
        }
    }
    out.set_final(sa + 1, a.start_weight());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectSide {
    Input,
    Output,
}

/// Acceptor over one tape.
pub fn project(a: &Fst, side: ProjectSide) -> Fst {
    let mut out = a.clone();
    for s in out.states() {
        for arc in out.arcs_mut(s) {
            match side {
                ProjectSide::Input => arc.olabel = arc.ilabel,
                ProjectSide::Output => arc.ilabel = arc.olabel,
            }
        }
    }
    let table = match side {
        ProjectSide::Input => a.isymbols(),
        ProjectSide::Output => a.osymbols(),
    };
    out.set_symbols(table.cloned());
    out
}

/// `Σ* \ L(A)` for a boolean acceptor, with `Σ = alphabet ∪ alphabet(A)`.
pub fn complement(a: &Fst, alphabet: &[Label]) -> Result<Fst> {
    let kind = a.semiring();
    if kind != Semiring::Boolean {
        return Err(Error::UnsupportedKind { op: "complement", kind });
    }
    if !a.is_acceptor() {
        return Err(Error::Contract("complement needs an acceptor".into()));
    }
    let mut sigma: Vec<Label> = alphabet.iter().copied().filter(|&l| l != EPSILON).collect();
    sigma.extend(a.alphabet(false));
    sigma.sort_unstable();
    sigma.dedup();

    let mut d = if a.start().is_none() {
        Fst::new(kind)
    } else {
        crate::optimize::determinize(a)?
    };
    if d.start().is_none() {
        let s = d.add_state();
        d.set_start(s);
    }
    let sink = d.add_state();
    for q in d.states() {
        let mut have: Vec<Label> = d.arcs(q).iter().map(|x| x.ilabel).collect();
        have.sort_unstable();
        for &l in &sigma {
            if have.binary_search(&l).is_err() {
                d.add_arc(q, Arc::acceptor(l, kind.one(), sink));
            }
        }
        let f = if d.is_final(q) { kind.zero() } else { kind.one() };
        d.set_final(q, f);
    }
    d.copy_symbols(a);
    Ok(d)
}

/// `L(A) \ L(B)` for boolean acceptors.
pub fn difference(a: &Fst, b: &Fst) -> Result<Fst> {
    check_kinds(a, b)?;
    let mut sigma = a.alphabet(false);
    sigma.extend(b.alphabet(false));
    let nb = complement(b, &sigma)?;
    super::intersect(a, &nb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::weight_of;
    use crate::semiring::Weight;

    const T: Semiring = Semiring::Tropical;

    fn single(kind: Semiring, label: Label, w: f64) -> Fst {
        let mut f = Fst::new(kind);
        f.add_states(2);
        f.set_start(0);
        f.add_arc(0, Arc::acceptor(label, Weight(w), 1));
        f.set_final(1, kind.one());
        f
    }

    #[test]
    fn union_takes_the_better_branch() {
        let u = union(&single(T, 1, 2.0), &single(T, 1, 5.0)).unwrap();
        assert_eq!(weight_of(&u, &[1], None).unwrap(), Weight(2.0));
        let empty = Fst::new(T);
        let v = union(&single(T, 1, 2.0), &empty).unwrap();
        assert_eq!(weight_of(&v, &[1], None).unwrap(), Weight(2.0));
    }

    #[test]
    fn concat_adds_weights() {
        let c = concat(&single(T, 1, 2.0), &single(T, 2, 3.0)).unwrap();
        assert_eq!(weight_of(&c, &[1, 2], None).unwrap(), Weight(5.0));
        assert_eq!(weight_of(&c, &[1], None).unwrap(), Weight::INFINITY);
    }

    #[test]
    fn closure_repeats() {
        let s = closure(&single(T, 2, 3.0)).unwrap();
        assert_eq!(weight_of(&s, &[], None).unwrap(), Weight(0.0));
        assert_eq!(weight_of(&s, &[2, 2, 2], None).unwrap(), Weight(9.0));
        let e = closure(&Fst::new(T)).unwrap();
        assert_eq!(weight_of(&e, &[], None).unwrap(), Weight(0.0));
        assert_eq!(weight_of(&e, &[1], None).unwrap(), Weight::INFINITY);
        assert!(closure(&Fst::new(Semiring::Real)).is_err());
    }

    #[test]
    fn reverse_flips_strings() {
        let f = Fst::linear(T, &[1, 2, 3]);
        let r = reverse(&f);
        assert_eq!(weight_of(&r, &[3, 2, 1], None).unwrap(), Weight(0.0));
        assert_eq!(weight_of(&r, &[1, 2, 3], None).unwrap(), Weight::INFINITY);
    }

    #[test]
    fn project_output_side() {
        let f = Fst::linear_transducer(T, &[1], &[2]);
        let p = project(&f, ProjectSide::Output);
        assert!(p.is_acceptor());
        assert_eq!(weight_of(&p, &[2], None).unwrap(), Weight(0.0));
    }

    #[test]
    fn complement_of_empty_is_sigma_star() {
        let b = Semiring::Boolean;
        let c = complement(&Fst::new(b), &[1, 2]).unwrap();
        for s in [vec![], vec![1], vec![2, 1, 1]] {
            assert_eq!(weight_of(&c, &s, None).unwrap(), Weight(1.0));
        }
        let one = single(b, 1, 1.0);
        let nc = complement(&one, &[1, 2]).unwrap();
        assert_eq!(weight_of(&nc, &[1], None).unwrap(), Weight(0.0));
        assert_eq!(weight_of(&nc, &[1, 1], None).unwrap(), Weight(1.0));
        assert!(complement(&single(T, 1, 0.0), &[1]).is_err());
    }
}
