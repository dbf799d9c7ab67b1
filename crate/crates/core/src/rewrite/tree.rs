//! Decision trees compiled to weighted same-length transducers.
//!
//! ```text
//! Alphabet = [a e t d]
//! Class V = [a e]
//! split left V
//!   split right V
//!     leaf t -> <0.2> d | <1.6> t
//!     leaf t -> <0> t
//!   leaf t -> <0> t
//! ```
//!
//! A `split` node has two indented children: the first applies when the
//! context matches, the second when it does not. `left R` asks whether the
//! input before the symbol ends in `R`, `right R` whether the input after it
//! starts with `R`. A leaf lists the weighted outputs of its input symbol;
//! a missing weight means zero. Several roots form a forest, and every tree
//! of a forest constrains the same strings.
//!
//! Each leaf becomes a constraint over symbol pairs: where its context holds
//! its input symbol must map to one of its outputs, elsewhere the leaf
//! allows anything. The tree is the same-length intersection of its leaves.

use std::collections::{BTreeMap, BTreeSet};

use super::compile::{dfa, Markers};
use super::file::find_unescaped;
use super::marker::{complete, marker, MarkerType};
use super::regex::{Grammar, Regex};
use crate::error::{Error, Result};
use crate::fst::{connect, Arc, Fst, Label, StateId, EPSILON};
use crate::ops::{complement, compose, concat, intersect, reverse};
use crate::optimize::rm_epsilon;
use crate::semiring::{Semiring, Weight};

const T: Semiring = Semiring::Tropical;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split {
        side: Side,
        context: Regex,
        yes: Box<TreeNode>,
        no: Box<TreeNode>,
    },
    Leaf {
        input: Label,
        outputs: Vec<(Label, Weight)>,
    },
}

#[derive(Debug, Clone)]
pub struct DecisionForest {
    pub grammar: Grammar,
    pub trees: Vec<TreeNode>,
}

struct Line<'a> {
    number: usize,
    indent: usize,
    text: &'a str,
}

impl DecisionForest {
    pub fn parse(text: &str) -> Result<DecisionForest> {
        let mut grammar = Grammar::new();
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let number = i + 1;
            let err = |message: &str| Error::Parse {
                line: number,
                message: message.into(),
            };
            if let Some(rest) = trimmed.strip_prefix("Alphabet") {
                let body = rest
                    .trim()
                    .strip_prefix('=')
                    .ok_or_else(|| err("expected `Alphabet = [...]`"))?;
                for m in bracketed(body).ok_or_else(|| err("expected `[symbol ...]`"))? {
                    grammar.symbol(m)?;
                }
                grammar.close();
            } else if let Some(rest) = trimmed.strip_prefix("Class ") {
                let (name, body) = rest
                    .split_once('=')
                    .ok_or_else(|| err("expected `Class NAME = [...]`"))?;
                let ms = bracketed(body).ok_or_else(|| err("expected `[symbol ...]`"))?;
                grammar.define_class(name.trim(), &ms)?;
            } else {
                let indent = raw.len() - raw.trim_start().len();
                lines.push(Line {
                    number,
                    indent,
                    text: trimmed,
                });
            }
        }
        let mut pos = 0;
        let mut trees = Vec::new();
        while pos < lines.len() {
            let indent = lines[pos].indent;
            trees.push(parse_node(&lines, &mut pos, indent, &mut grammar)?);
        }
        if trees.is_empty() {
            return Err(Error::Config("no decision tree given".into()));
        }
        grammar.close();
        Ok(DecisionForest { grammar, trees })
    }

    pub fn compile(&self) -> Result<Fst> {
        compile_forest(&self.trees, &self.grammar)
    }
}

fn bracketed(text: &str) -> Option<Vec<&str>> {
    let t = text.trim().trim_end_matches(';').trim();
    Some(t.strip_prefix('[')?.strip_suffix(']')?.split_whitespace().collect())
}

fn parse_node(lines: &[Line<'_>], pos: &mut usize, indent: usize, g: &mut Grammar) -> Result<TreeNode> {
    let Some(line) = lines.get(*pos) else {
        return Err(Error::Config("split node is missing a child".into()));
    };
    let err = |message: String| Error::Parse {
        line: line.number,
        message,
    };
    if line.indent != indent {
        return Err(err("unexpected indentation".into()));
    }
    *pos += 1;
    if let Some(rest) = line.text.strip_prefix("split ") {
        let rest = rest.trim_start();
        let (side, regex) = if let Some(r) = rest.strip_prefix("left") {
            (Side::Left, r)
        } else if let Some(r) = rest.strip_prefix("right") {
            (Side::Right, r)
        } else {
            return Err(err("expected `split left|right <regex>`".into()));
        };
        let context = g.parse(regex).map_err(|e| err(e.to_string()))?;
        let child = lines.get(*pos).map(|l| l.indent).filter(|&c| c > indent);
        let child = child.ok_or_else(|| err("split needs two indented children".into()))?;
        let yes = parse_node(lines, pos, child, g)?;
        let no = parse_node(lines, pos, child, g)?;
        if lines.get(*pos).is_some_and(|l| l.indent > indent) {
            return Err(Error::Parse {
                line: lines[*pos].number,
                message: "split has more than two children".into(),
            });
        }
        return Ok(TreeNode::Split {
            side,
            context,
            yes: Box::new(yes),
            no: Box::new(no),
        });
    }
    let rest = line
        .text
        .strip_prefix("leaf ")
        .ok_or_else(|| err("expected `split` or `leaf`".into()))?;
    let arrow = find_unescaped(rest, "->").ok_or_else(|| err("expected `leaf <symbol> -> outputs`".into()))?;
    let input = g.symbol(rest[..arrow].trim()).map_err(|e| err(e.to_string()))?;
    let mut outputs = Vec::new();
    for alt in rest[arrow + 2..].split('|') {
        let alt = alt.trim();
        let (w, sym) = match alt.strip_prefix('<') {
            Some(r) => {
                let (w, s) = r
                    .split_once('>')
                    .ok_or_else(|| err("missing `>` after weight".into()))?;
                (w.trim().parse::<Weight>()?, s.trim())
            }
            None => (Weight(0.0), alt),
        };
        T.check(w)?;
        if sym.is_empty() || sym.contains(char::is_whitespace) {
            return Err(err(format!("leaf output `{alt}` must be one symbol")));
        }
        outputs.push((g.symbol(sym).map_err(|e| err(e.to_string()))?, w));
    }
    Ok(TreeNode::Leaf { input, outputs })
}

/// Leaves with the left and right context regexes (and whether each must
/// match or must fail) collected along their root paths.
type Constraints = Vec<(Side, Regex, bool)>;

fn leaves<'a>(node: &'a TreeNode, path: &mut Constraints, out: &mut Vec<(Constraints, &'a TreeNode)>) {
    match node {
        TreeNode::Leaf { .. } => out.push((path.clone(), node)),
        TreeNode::Split { side, context, yes, no } => {
            path.push((*side, context.clone(), true));
            leaves(yes, path, out);
            path.pop();
            path.push((*side, context.clone(), false));
            leaves(no, path, out);
            path.pop();
        }
    }
}

fn compile_forest(trees: &[TreeNode], g: &Grammar) -> Result<Fst> {
    let sigma = g.alphabet();
    let mut per_tree = Vec::new();
    // Pairs allowed at a position: identity, plus every leaf output.
    let mut pairs: BTreeMap<Label, BTreeSet<Label>> = sigma.iter().map(|&s| (s, BTreeSet::from([s]))).collect();
    for tree in trees {
        let mut ls = Vec::new();
        leaves(tree, &mut Vec::new(), &mut ls);
        let mut input = None;
        for (_, leaf) in &ls {
            let TreeNode::Leaf { input: i, outputs } = leaf else {
                unreachable!()
            };
            if *input.get_or_insert(*i) != *i {
                return Err(Error::Config(
                    "all leaves of a tree must rewrite the same symbol".into(),
                ));
            }
            pairs.entry(*i).or_default().extend(outputs.iter().map(|o| o.0));
        }
        per_tree.push(ls);
    }
    let mut acc: Option<Fst> = None;
    for ls in &per_tree {
        for (constraints, leaf) in ls {
            let TreeNode::Leaf { input, outputs } = leaf else {
                unreachable!()
            };
            let c = leaf_constraint(*input, outputs, constraints, &pairs, &sigma)?;
            acc = Some(match acc {
                None => c,
                Some(a) => intersect_samelength(&a, &c)?,
            });
        }
    }
    let mut out = acc.expect("forest has at least one leaf");
    out.set_symbols(Some(std::sync::Arc::new(g.symbols().clone())));
    Ok(out)
}

/// Boolean acceptor of the strings meeting every constraint on `side`.
fn context_language(constraints: &Constraints, side: Side, sigma: &[Label]) -> Result<Fst> {
    let all = Fst::sigma_star(T, sigma);
    let mut lang = Fst::sigma_star(Semiring::Boolean, sigma);
    for (s, r, positive) in constraints {
        if *s != side {
            continue;
        }
        let body = r.compile(sigma)?;
        let l = match side {
            Side::Left => concat(&all, &body)?,
            Side::Right => concat(&body, &all)?,
        };
        let mut l = dfa(&l)?;
        if !positive {
            l = complement(&l, sigma)?;
        }
        lang = dfa(&intersect(&lang, &l)?)?;
    }
    Ok(lang)
}

fn leaf_constraint(
    input: Label,
    outputs: &[(Label, Weight)],
    constraints: &Constraints,
    pairs: &BTreeMap<Label, BTreeSet<Label>>,
    sigma: &[Label],
) -> Result<Fst> {
    let one = T.one();
    let mk = Markers::above(sigma);
    let right = context_language(constraints, Side::Right, sigma)?;
    let r = reverse(&marker(
        &dfa(&reverse(&right))?,
        sigma,
        MarkerType::Insert,
        &[mk.gt],
        &[],
    )?);
    let left = complete(&context_language(constraints, Side::Left, sigma)?, sigma);

    // States (q, pending): 0 free, 1 a mark must follow, 2 no mark may follow.
    let n = left.num_states();
    let id = |q: StateId, p: usize| q * 3 + p;
    let mut g = Fst::new(T);
    g.add_states(n * 3);
    g.set_start(id(left.start().expect("complete machine has a start"), 0));
    for q in left.states() {
        g.set_final(id(q, 0), one);
        g.set_final(id(q, 2), one);
        g.add_arc(id(q, 0), Arc::new(mk.gt, EPSILON, one, id(q, 0)));
        g.add_arc(id(q, 1), Arc::new(mk.gt, EPSILON, one, id(q, 0)));
        for a in left.arcs(q) {
            let s = a.ilabel;
            let next = a.nextstate;
            for from in [id(q, 0), id(q, 2)] {
                if s == input && left.is_final(q) {
                    for &(o, w) in outputs {
                        g.add_arc(from, Arc::new(s, o, w, id(next, 1)));
                    }
                    for &o in &pairs[&s] {
                        g.add_arc(from, Arc::new(s, o, one, id(next, 2)));
                    }
                } else {
                    for &o in &pairs[&s] {
                        g.add_arc(from, Arc::new(s, o, one, id(next, 0)));
                    }
                }
            }
        }
    }
    Ok(connect(&rm_epsilon(&compose(&r, &g)?)?))
}

/// Intersection of two same-length transducers: `(u, v) ↦ A(u, v) ⊗ B(u, v)`.
pub fn intersect_samelength(a: &Fst, b: &Fst) -> Result<Fst> {
    let mut codes: BTreeMap<(Label, Label), Label> = BTreeMap::new();
    let mut encode = |f: &Fst| -> Result<Fst> {
        let mut e = f.clone();
        for q in e.states() {
            for arc in e.arcs_mut(q) {
                if arc.ilabel == EPSILON || arc.olabel == EPSILON {
                    return Err(Error::Contract(
                        "same-length intersection needs ε-free transducers".into(),
                    ));
                }
                let next = codes.len() as Label + 1;
                let code = *codes.entry((arc.ilabel, arc.olabel)).or_insert(next);
                arc.ilabel = code;
                arc.olabel = code;
            }
        }
        e.set_symbols(None);
        Ok(e)
    };
    let ea = encode(a)?;
    let eb = encode(b)?;
    let mut out = intersect(&ea, &eb)?;
    let decode: BTreeMap<Label, (Label, Label)> = codes.into_iter().map(|(k, v)| (v, k)).collect();
    for q in out.states() {
        for arc in out.arcs_mut(q) {
            let (i, o) = decode[&arc.ilabel];
            arc.ilabel = i;
            arc.olabel = o;
        }
    }
    out.set_isymbols(a.isymbols().cloned());
    out.set_osymbols(a.osymbols().cloned());
    Ok(out)
}
