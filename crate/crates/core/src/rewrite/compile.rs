//! Rule compilation as the composition `r ∘ f ∘ replace ∘ l1 ∘ l2`.
//!
//! With `>`, `<1`, `<2` fresh marker symbols:
//!
//! - `r` puts `>` before every position where the right context starts;
//! - `f` puts `<1` or `<2` before every φ occurrence followed by `>`;
//! - `replace` rewrites `<1 φ >` as `<1 ψ` and drops the other `>`;
//! - `l1` admits `<1` only after the left context and deletes it;
//! - `l2` admits `<2` only where the left context fails and deletes it.
//!
//! The left context is therefore checked against the rewritten output and
//! the right context against the untouched input.

use std::sync::Arc as Shared;

use super::marker::{complete, ignoring, marker, MarkerType};
use super::regex::{Grammar, Regex};
use crate::error::{Error, Result};
use crate::fst::{connect, weight_of, Arc, Fst, Label, StateId, EPSILON};
use crate::ops::{compose, concat, intersect, reverse};
use crate::optimize::{determinize, rm_epsilon};
use crate::semiring::Semiring;

const T: Semiring = Semiring::Tropical;

/// `phi -> psi / lambda _ rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub phi: Regex,
    pub psi: Regex,
    pub lambda: Regex,
    pub rho: Regex,
}

impl Rule {
    /// Parses the three parts of a rule written in regex syntax.
    pub fn parse(grammar: &mut Grammar, phi: &str, psi: &str, lambda: &str, rho: &str) -> Result<Rule> {
        Ok(Rule {
            phi: grammar.parse(phi)?,
            psi: grammar.parse(psi)?,
            lambda: grammar.parse(lambda)?,
            rho: grammar.parse(rho)?,
        })
    }
}

/// The three marker labels, placed above every label of the alphabet.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Markers {
    pub gt: Label,
    pub lt1: Label,
    pub lt2: Label,
}

impl Markers {
    pub fn above(sigma: &[Label]) -> Markers {
        let base = sigma.iter().copied().max().unwrap_or(0) + 1;
        Markers {
            gt: base,
            lt1: base + 1,
            lt2: base + 2,
        }
    }

    fn contains(&self, l: Label) -> bool {
        l == self.gt || l == self.lt1 || l == self.lt2
    }
}

/// Deterministic boolean acceptor of the language of `f`.
pub(crate) fn dfa(f: &Fst) -> Result<Fst> {
    determinize(&f.convert(Semiring::Boolean)?)
}

/// Compiles one rule over the grammar's alphabet into a tropical transducer.
pub fn compile_rule(rule: &Rule, grammar: &Grammar) -> Result<Fst> {
    let sigma = grammar.alphabet();
    if rule.phi.is_weighted() || rule.lambda.is_weighted() || rule.rho.is_weighted() {
        return Err(Error::Unsupported(
            "only the replacement of a rule may carry weights".into(),
        ));
    }
    let phi = rule.phi.compile(&sigma)?;
    if !T.is_zero(weight_of(&phi, &[], None)?) {
        return Err(Error::Unsupported(
            "the rewritten pattern must not match the empty string".into(),
        ));
    }
    let psi = rule.psi.compile(&sigma)?;
    let all = Fst::sigma_star(T, &sigma);
    let left = concat(&all, &rule.lambda.compile(&sigma)?)?;
    let right = concat(&rule.rho.compile(&sigma)?, &all)?;
    let mut out = compile_parts(&phi, &psi, &left, &right, &sigma)?;
    let table = Shared::new(grammar.symbols().clone());
    out.set_symbols(Some(table));
    Ok(out)
}

/// The same compiler with the contexts given as whole languages: a site
/// at position `i` of input `x` with current output `y` is rewritten iff
/// `y ∈ left` and the input after the match is in `right`.
pub(crate) fn compile_parts(phi: &Fst, psi: &Fst, left: &Fst, right: &Fst, sigma: &[Label]) -> Result<Fst> {
    let mk = Markers::above(sigma);
    let r = reverse(&marker(
        &dfa(&reverse(right))?,
        sigma,
        MarkerType::Insert,
        &[mk.gt],
        &[],
    )?);
    let f = build_f(phi, sigma, mk)?;
    let replace = build_replace(phi, psi, sigma, mk);
    let left_dfa = complete(&dfa(left)?, sigma);
    let mut sigma2 = sigma.to_vec();
    sigma2.push(mk.lt2);
    let l1 = marker(
        &ignoring(&left_dfa, &[mk.lt2]),
        &sigma2,
        MarkerType::DeleteWhere,
        &[],
        &[mk.lt1],
    )?;
    let l2 = marker(&left_dfa, sigma, MarkerType::DeleteWhereNot, &[], &[mk.lt2])?;

    let mut out = r;
    for stage in [&f, &replace, &l1, &l2] {
        out = compose(&out, stage)?;
    }
    let out = connect(&rm_epsilon(&out)?);
    let leaked = out
        .states()
        .flat_map(|q| out.arcs(q))
        .any(|a| mk.contains(a.ilabel) || mk.contains(a.olabel));
    if leaked {
        return Err(Error::Contract("marker symbol left in a compiled rule".into()));
    }
    Ok(out)
}

/// `reverse(Marker((Σ ∪ >)* > reverse(φ)_>, insert {<1, <2}))`, restricted
/// so the mark lands directly before the first symbol of φ.
fn build_f(phi: &Fst, sigma: &[Label], mk: Markers) -> Result<Fst> {
    let mut gamma = sigma.to_vec();
    gamma.push(mk.gt);
    let all = Fst::sigma_star(T, &gamma);
    let pattern = concat(
        &concat(&all, &Fst::linear(T, &[mk.gt]))?,
        &ignoring(&reverse(phi), &[mk.gt]),
    )?;
    let mut last = Fst::new(T);
    last.add_states(2);
    last.set_start(0);
    last.set_final(1, T.one());
    for &l in sigma {
        last.add_arc(0, Arc::acceptor(l, T.one(), 1));
    }
    let ends_in_sigma = concat(&all, &last)?;
    let alpha = dfa(&intersect(&pattern, &ends_in_sigma)?)?;
    Ok(reverse(&marker(
        &alpha,
        &gamma,
        MarkerType::Insert,
        &[mk.lt1, mk.lt2],
        &[],
    )?))
}

/// Copies `src` into `dst` and returns the state offset.
fn append(dst: &mut Fst, src: &Fst) -> StateId {
    let base = dst.num_states();
    dst.add_states(src.num_states());
    for q in src.states() {
        for a in src.arcs(q) {
            dst.add_arc(
                base + q,
                Arc {
                    nextstate: base + a.nextstate,
                    ..*a
                },
            );
        }
    }
    base
}

/// Loops over Σ, `<2` and (deleted) `>`; a `<1` opens a span reading φ
/// with markers deleted, closed by `>` and replaced by ψ.
fn build_replace(phi: &Fst, psi: &Fst, sigma: &[Label], mk: Markers) -> Fst {
    let one = T.one();
    let mut out = Fst::new(T);
    let home = out.add_state();
    out.set_start(home);
    out.set_final(home, one);
    for &l in sigma.iter().chain([&mk.lt2]) {
        out.add_arc(home, Arc::new(l, l, one, home));
    }
    out.add_arc(home, Arc::new(mk.gt, EPSILON, one, home));

    let mut span = phi.clone();
    for q in span.states() {
        for a in span.arcs_mut(q) {
            a.olabel = EPSILON;
        }
        for m in [mk.gt, mk.lt1, mk.lt2] {
            span.add_arc(q, Arc::new(m, EPSILON, one, q));
        }
    }
    let sb = append(&mut out, &span);
    let psi_in = {
        let mut p = psi.clone();
        for q in p.states() {
            for a in p.arcs_mut(q) {
                a.ilabel = EPSILON;
            }
        }
        p
    };
    let pb = append(&mut out, &psi_in);
    if let (Some(s), Some(p)) = (span.start(), psi_in.start()) {
        out.add_arc(home, Arc::new(mk.lt1, mk.lt1, span.start_weight(), sb + s));
        for q in span.states() {
            if span.is_final(q) {
                let w = T.times(span.final_weight(q), psi_in.start_weight());
                out.add_arc(sb + q, Arc::new(mk.gt, EPSILON, w, pb + p));
            }
        }
        for q in psi_in.states() {
            if psi_in.is_final(q) {
                out.add_arc(pb + q, Arc::new(EPSILON, EPSILON, psi_in.final_weight(q), home));
            }
        }
    }
    out
}
