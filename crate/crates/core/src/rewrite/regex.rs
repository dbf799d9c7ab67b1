//! Regular expressions over a symbol table.
//!
//! Syntax, loosest binding first:
//!
//! ```text
//! r | r        union (an empty branch is ε)
//! r & r        intersection (unweighted operands only)
//! r r          concatenation; whitespace only separates
//! ~r           complement with respect to the alphabet (unweighted only)
//! r* r+ r?     repetition
//! ( )  ()      grouping; `()` alone is ε
//! [abc] [^ab]  symbol class and its complement
//! .            any alphabet symbol
//! {name}       multi-character symbol
//! <w>          ε carrying tropical weight w
//! \c           the character c taken literally
//! ```
//!
//! Any other character is a one-character symbol. Declared class names are
//! recognized by longest match before single characters.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fst::{Arc, Fst, Label, SymbolTable, EPSILON};
use crate::ops::{closure, complement, concat, intersect, union};
use crate::optimize::{determinize, rm_epsilon};
use crate::semiring::{Semiring, Weight};

#[derive(Debug, Clone, PartialEq)]
pub enum Regex {
    Epsilon,
    Symbol(Label),
    Any,
    Class { labels: Vec<Label>, negated: bool },
    Weight(f64),
    Concat(Vec<Regex>),
    Union(Vec<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
    Optional(Box<Regex>),
    Complement(Box<Regex>),
    Intersect(Box<Regex>, Box<Regex>),
}

/// Symbols and named classes shared by the expressions of one rule set.
#[derive(Debug, Clone, Default)]
pub struct Grammar {
    symbols: SymbolTable,
    classes: BTreeMap<String, Vec<Label>>,
    /// When set, unknown literals are errors instead of new symbols.
    closed: bool,
}

impl Grammar {
    /// An open grammar: literals are added to the table as they appear.
    pub fn new() -> Self {
        Grammar::default()
    }

    /// A grammar whose alphabet is exactly the symbols of `symbols`.
    pub fn closed(symbols: SymbolTable) -> Self {
        Grammar {
            symbols,
            classes: BTreeMap::new(),
            closed: true,
        }
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Fixes the alphabet: later literals must already be known.
    pub fn close(&mut self) {
        self.closed = true;
    }

    /// Every non-ε symbol.
    pub fn alphabet(&self) -> Vec<Label> {
        self.symbols.labels()
    }

    pub fn symbol(&mut self, name: &str) -> Result<Label> {
        if name == crate::fst::EPSILON_SYMBOL {
            return Ok(EPSILON);
        }
        match self.symbols.find_label(name) {
            Some(l) => Ok(l),
            None if self.closed => Err(Error::Symbol(format!("`{name}` is not in the alphabet"))),
            None => Ok(self.symbols.add_symbol(name)),
        }
    }

    pub fn define_class(&mut self, name: &str, members: &[&str]) -> Result<()> {
        if name.is_empty() || name.chars().any(|c| !c.is_alphanumeric() && c != '_') {
            return Err(Error::Config(format!("bad class name `{name}`")));
        }
        let labels = members.iter().map(|m| self.symbol(m)).collect::<Result<Vec<_>>>()?;
        self.classes.insert(name.to_string(), labels);
        Ok(())
    }

    pub fn class(&self, name: &str) -> Option<&[Label]> {
        self.classes.get(name).map(Vec::as_slice)
    }

    pub fn parse(&mut self, text: &str) -> Result<Regex> {
        let mut p = Parser {
            chars: text.chars().collect(),
            pos: 0,
            g: self,
        };
        let r = p.union()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
        }
        Ok(r)
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    g: &'a mut Grammar,
}

const SPECIAL: &str = "|&~*+?()[].{}<>\\";

impl Parser<'_> {
    fn error(&self, message: String) -> Error {
        Error::Parse {
            line: 0,
            message: format!("regex column {}: {message}", self.pos + 1),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn union(&mut self) -> Result<Regex> {
        let mut alts = vec![self.intersection()?];
        while self.eat('|') {
            alts.push(self.intersection()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            Regex::Union(alts)
        })
    }

    fn intersection(&mut self) -> Result<Regex> {
        let mut r = self.concat()?;
        while self.eat('&') {
            let rhs = self.concat()?;
            r = Regex::Intersect(Box::new(r), Box::new(rhs));
        }
        Ok(r)
    }

    fn concat(&mut self) -> Result<Regex> {
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if matches!(c, '|' | '&' | ')') {
                break;
            }
            items.push(self.unary()?);
        }
        Ok(match items.len() {
            0 => Regex::Epsilon,
            1 => items.pop().unwrap(),
            _ => Regex::Concat(items),
        })
    }

    fn unary(&mut self) -> Result<Regex> {
        if self.eat('~') {
            return Ok(Regex::Complement(Box::new(self.unary()?)));
        }
        let mut r = self.atom()?;
        loop {
            r = match self.peek() {
                Some('*') => Regex::Star(Box::new(r)),
                Some('+') => Regex::Plus(Box::new(r)),
                Some('?') => Regex::Optional(Box::new(r)),
                _ => return Ok(r),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Regex> {
        let Some(c) = self.peek() else {
            return Err(self.error("expression ends early".into()));
        };
        match c {
            '(' => {
                self.pos += 1;
                let r = self.union()?;
                if !self.eat(')') {
                    return Err(self.error("missing `)`".into()));
                }
                Ok(r)
            }
            '[' => {
                self.pos += 1;
                self.class()
            }
            '.' => {
                self.pos += 1;
                Ok(Regex::Any)
            }
            '<' => {
                self.pos += 1;
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|&c| c != '>') {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                if !self.eat('>') {
                    return Err(self.error("missing `>` after weight".into()));
                }
                let w: Weight = text.trim().parse()?;
                Semiring::Tropical.check(w)?;
                Ok(Regex::Weight(w.0))
            }
            _ => self.symbol_or_class(),
        }
    }

    /// One symbol: `{name}`, an escape, a class name, or a single character.
    fn symbol_or_class(&mut self) -> Result<Regex> {
        let c = self.chars[self.pos];
        if c == '{' {
            let end = self.chars[self.pos..]
                .iter()
                .position(|&c| c == '}')
                .ok_or_else(|| self.error("missing `}`".into()))?;
            let name: String = self.chars[self.pos + 1..self.pos + end].iter().collect();
            self.pos += end + 1;
            return Ok(Regex::Symbol(self.g.symbol(name.trim())?));
        }
        if c == '\\' {
            let Some(&e) = self.chars.get(self.pos + 1) else {
                return Err(self.error("dangling `\\`".into()));
            };
            self.pos += 2;
            return Ok(Regex::Symbol(self.g.symbol(&e.to_string())?));
        }
        if SPECIAL.contains(c) {
            return Err(self.error(format!("unexpected `{c}`")));
        }
        let rest: String = self.chars[self.pos..].iter().collect();
        let class = self
            .g
            .classes
            .iter()
            .filter(|(name, _)| rest.starts_with(name.as_str()))
            .max_by_key(|(name, _)| name.len())
            .map(|(name, labels)| (name.chars().count(), labels.clone()));
        if let Some((len, labels)) = class {
            self.pos += len;
            return Ok(Regex::Class { labels, negated: false });
        }
        self.pos += 1;
        Ok(Regex::Symbol(self.g.symbol(&c.to_string())?))
    }

    fn class(&mut self) -> Result<Regex> {
        let negated = self.eat('^');
        let mut labels = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.error("missing `]`".into())),
                Some(']') => {
                    self.pos += 1;
                    break;
                }
                Some(_) => match self.symbol_or_class()? {
                    Regex::Symbol(l) => labels.push(l),
                    Regex::Class { labels: ls, .. } => labels.extend(ls),
                    _ => unreachable!(),
                },
            }
        }
        labels.sort_unstable();
        labels.dedup();
        Ok(Regex::Class { labels, negated })
    }
}

impl Regex {
    pub fn is_weighted(&self) -> bool {
        match self {
            Regex::Weight(w) => *w != 0.0,
            Regex::Concat(v) | Regex::Union(v) => v.iter().any(Regex::is_weighted),
            Regex::Star(r) | Regex::Plus(r) | Regex::Optional(r) | Regex::Complement(r) => r.is_weighted(),
            Regex::Intersect(a, b) => a.is_weighted() || b.is_weighted(),
            _ => false,
        }
    }

    /// Tropical acceptor of the weighted language, with `alphabet` giving
    /// the meaning of `.`, `[^...]` and `~`.
    pub fn compile(&self, alphabet: &[Label]) -> Result<Fst> {
        const T: Semiring = Semiring::Tropical;
        Ok(match self {
            Regex::Epsilon => Fst::linear(T, &[]),
            Regex::Symbol(l) => Fst::linear(T, &[*l]),
            Regex::Weight(w) => {
                let mut f = Fst::linear(T, &[]);
                f.set_start_weight(Weight(*w));
                f
            }
            Regex::Any => symbol_set(alphabet),
            Regex::Class { labels, negated: false } => symbol_set(labels),
            Regex::Class { labels, negated: true } => {
                let rest: Vec<Label> = alphabet.iter().copied().filter(|l| !labels.contains(l)).collect();
                symbol_set(&rest)
            }
            Regex::Concat(items) => {
                let mut acc = Fst::linear(T, &[]);
                for r in items {
                    acc = concat(&acc, &r.compile(alphabet)?)?;
                }
                acc
            }
            Regex::Union(alts) => {
                let mut acc = alts[0].compile(alphabet)?;
                for r in &alts[1..] {
                    acc = union(&acc, &r.compile(alphabet)?)?;
                }
                acc
            }
            Regex::Star(r) => closure(&r.compile(alphabet)?)?,
            Regex::Plus(r) => {
                let a = r.compile(alphabet)?;
                concat(&a, &closure(&a)?)?
            }
            Regex::Optional(r) => union(&Fst::linear(T, &[]), &r.compile(alphabet)?)?,
            Regex::Complement(r) => {
                let b = unweighted(r, alphabet, "complement")?;
                complement(&b, alphabet)?.convert(T)?
            }
            Regex::Intersect(a, b) => {
                let x = unweighted(a, alphabet, "intersection")?;
                let y = unweighted(b, alphabet, "intersection")?;
                determinize(&intersect(&x, &y)?)?.convert(T)?
            }
        })
    }
}

fn unweighted(r: &Regex, alphabet: &[Label], op: &str) -> Result<Fst> {
    if r.is_weighted() {
        return Err(Error::Unsupported(format!("{op} of a weighted expression")));
    }
    r.compile(alphabet)?.convert(Semiring::Boolean)
}

/// Two-state acceptor of single symbols.
fn symbol_set(labels: &[Label]) -> Fst {
    let t = Semiring::Tropical;
    let mut f = Fst::new(t);
    f.add_states(2);
    f.set_start(0);
    f.set_final(1, t.one());
    for &l in labels {
        f.add_arc(0, Arc::acceptor(l, t.one(), 1));
    }
    f
}

/// Boolean acceptor of `L(r)`, deterministic and ε-free.
pub fn compile_regex(r: &Regex, alphabet: &[Label]) -> Result<Fst> {
    let b = unweighted(r, alphabet, "boolean compilation")?;
    determinize(&rm_epsilon(&b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fst::weight_of;

    fn grammar(symbols: &str) -> Grammar {
        Grammar::closed(SymbolTable::from_symbols(symbols.split_whitespace()))
    }

    fn accepts(f: &Fst, g: &Grammar, s: &str) -> bool {
        let labels: Vec<Label> = s.chars().map(|c| g.symbols().label(&c.to_string()).unwrap()).collect();
        f.semiring().is_one(weight_of(f, &labels, None).unwrap())
    }

    /// All strings over `sigma` up to length `n`.
    fn strings(sigma: &[char], n: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        let mut layer = vec![String::new()];
        for _ in 0..n {
            layer = layer
                .iter()
                .flat_map(|s| sigma.iter().map(move |c| format!("{s}{c}")))
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    #[test]
    fn star_and_union() {
        let mut g = grammar("a b c");
        let r = g.parse("a b* | c").unwrap();
        let f = compile_regex(&r, &g.alphabet()).unwrap();
        for s in strings(&['a', 'b', 'c'], 6) {
            let expect = s == "c" || (s.starts_with('a') && s[1..].chars().all(|c| c == 'b'));
            assert_eq!(accepts(&f, &g, &s), expect, "{s}");
        }
    }

    #[test]
    fn complement_rejects_containing() {
        let mut g = grammar("a b");
        let r = g.parse("~(.* a .*)").unwrap();
        let f = compile_regex(&r, &g.alphabet()).unwrap();
        for s in strings(&['a', 'b'], 5) {
            assert_eq!(accepts(&f, &g, &s), !s.contains('a'), "{s}");
        }
    }

    #[test]
    fn empty_group_is_epsilon() {
        let mut g = grammar("a");
        let f = compile_regex(&g.parse("()").unwrap(), &g.alphabet()).unwrap();
        assert!(accepts(&f, &g, ""));
        assert!(!accepts(&f, &g, "a"));
    }

    #[test]
    fn classes_names_and_weights() {
        let mut g = grammar("a b m $ #");
        g.define_class("VStop", &["b", "m"]).unwrap();
        assert_eq!(
            g.parse("($|#)VStop").unwrap(),
            Regex::Concat(vec![
                Regex::Union(vec![Regex::Symbol(4), Regex::Symbol(5)]),
                Regex::Class {
                    labels: vec![2, 3],
                    negated: false
                },
            ])
        );
        let r = g.parse("<0.9>a | <0.1>b").unwrap();
        assert!(r.is_weighted());
        let f = r.compile(&g.alphabet()).unwrap();
        assert_eq!(weight_of(&f, &[1], None).unwrap(), Weight(0.9));
        assert!(g.parse("~<1>a").unwrap().compile(&g.alphabet()).is_err());
        assert!(matches!(g.parse("z"), Err(Error::Symbol(_))));
        assert!(g.parse("(a").is_err());
        assert_eq!(
            g.parse("[^a b]").unwrap(),
            Regex::Class {
                labels: vec![1, 2],
                negated: true
            }
        );
    }
}
