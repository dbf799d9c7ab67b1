//! Line-oriented text format.
//!
//! ```text
//! src dst isym osym [weight]     transducer arc
//! src dst sym [weight]           acceptor arc (4 fields need `acceptor`)
//! state [weight]                 final state
//! # comment
//! ```
//!
//! The source of the first line is the start state. An omitted weight is the
//! semiring one. Without symbol tables labels are numeric ids; `<eps>` is
//! always accepted for label 0.

use std::fmt::Write as _;

use super::{Arc, Fst, Label, StateId, SymbolTable, SymbolsRef, EPSILON, EPSILON_SYMBOL};
use crate::error::{Error, Result};
use crate::semiring::{Semiring, Weight};

#[derive(Debug, Clone, Default)]
pub struct TextOptions {
    pub semiring: Semiring,
    pub isymbols: Option<SymbolsRef>,
    pub osymbols: Option<SymbolsRef>,
    /// Read four-field arc lines as `src dst sym weight`.
    pub acceptor: bool,
}

impl TextOptions {
    pub fn new(semiring: Semiring) -> Self {
        TextOptions {
            semiring,
            ..Default::default()
        }
    }

    pub fn with_symbols(mut self, isymbols: Option<SymbolsRef>, osymbols: Option<SymbolsRef>) -> Self {
        self.isymbols = isymbols;
        self.osymbols = osymbols;
        self
    }

    pub fn acceptor(mut self, yes: bool) -> Self {
        self.acceptor = yes;
        self
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WriteOptions {
    /// Print single-label arc lines when the machine is an acceptor.
    pub acceptor: bool,
}

fn resolve(table: Option<&SymbolTable>, token: &str, line: usize) -> Result<Label> {
    if token == EPSILON_SYMBOL {
        return Ok(EPSILON);
    }
    match table {
        Some(t) => t
            .find_label(token)
            .ok_or_else(|| Error::Symbol(format!("line {line}: unknown symbol `{token}`"))),
        None => token.parse::<Label>().map_err(|_| {
            Error::Symbol(format!(
                "line {line}: `{token}` is not a numeric label and no symbol table was given"
            ))
        }),
    }
}

fn parse_state(token: &str, line: usize) -> Result<StateId> {
    token.parse::<StateId>().map_err(|_| Error::Parse {
        line,
        message: format!("bad state id `{token}`"),
    })
}

fn parse_weight(kind: Semiring, token: Option<&str>, line: usize) -> Result<Weight> {
    let Some(token) = token else {
        return Ok(kind.one());
    };
    let w: Weight = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad weight `{token}`"),
    })?;
    kind.check(w).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })
}

pub fn read_text(text: &str, opts: &TextOptions) -> Result<Fst> {
    let kind = opts.semiring;
    let isyms = opts.isymbols.as_deref();
    let osyms = opts.osymbols.as_deref();
    let mut fst = Fst::new(kind);
    fst.set_isymbols(opts.isymbols.clone());
    fst.set_osymbols(opts.osymbols.clone());
    let ensure = |fst: &mut Fst, s: StateId| {
        if s >= fst.num_states() {
            fst.add_states(s + 1 - fst.num_states());
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let src = parse_state(fields[0], line)?;
        ensure(&mut fst, src);
        if fst.start().is_none() {
            fst.set_start(src);
        }
        match fields.len() {
            1 | 2 => {
                let w = parse_weight(kind, fields.get(1).copied(), line)?;
                fst.set_final(src, w);
            }
            3..=5 => {
                let dst = parse_state(fields[1], line)?;
                ensure(&mut fst, dst);
                let (il, ol, w) = match (fields.len(), opts.acceptor) {
                    (3, _) => {
                        let l = resolve(isyms, fields[2], line)?;
                        (l, l, None)
                    }
                    (4, true) => {
                        let l = resolve(isyms, fields[2], line)?;
                        (l, l, Some(fields[3]))
                    }
                    (4, false) => (resolve(isyms, fields[2], line)?, resolve(osyms, fields[3], line)?, None),
                    (5, false) => (
                        resolve(isyms, fields[2], line)?,
                        resolve(osyms, fields[3], line)?,
                        Some(fields[4]),
                    ),
                    _ => {
                        return Err(Error::Parse {
                            line,
                            message: "five-field arc line in acceptor text".into(),
                        })
                    }
                };
                let w = parse_weight(kind, w, line)?;
                fst.add_arc(src, Arc::new(il, ol, w, dst));
            }
            n => {
                return Err(Error::Parse {
                    line,
                    message: format!("unexpected {n} fields"),
                });
            }
        }
    }
    Ok(fst)
}

fn label_text(out: &mut String, table: Option<&SymbolsRef>, label: Label) {
    match table.and_then(|t| t.find_symbol(label)) {
        Some(s) => out.push_str(s),
        None if label == EPSILON && table.is_some() => out.push_str(EPSILON_SYMBOL),
        None => {
            let _ = write!(out, "{label}");
        }
    }
}

/// Canonical transducer-form text: the start state's block first, then the
/// remaining states ascending; each block lists arcs in stored order followed
/// by the final line. A start state with neither arcs nor a final weight is
/// written as a final line carrying the semiring zero, so it stays the start.
pub fn write_text(fst: &Fst) -> String {
    write_text_with(fst, WriteOptions::default())
}

pub fn write_text_with(fst: &Fst, opts: WriteOptions) -> String {
    let mut owned;
    let fst = if fst.semiring().is_one(fst.start_weight()) {
        fst
    } else {
        owned = fst.clone();
        owned.absorb_start_weight();
        &owned
    };
    let kind = fst.semiring();
    let acceptor = opts.acceptor && fst.is_acceptor();
    let mut out = String::new();
    let Some(start) = fst.start() else {
        return out;
    };
    let order = std::iter::once(start).chain(fst.states().filter(|&s| s != start));
    for s in order {
        for a in fst.arcs(s) {
            let _ = write!(out, "{s}\t{}\t", a.nextstate);
            label_text(&mut out, fst.isymbols(), a.ilabel);
            if !acceptor {
                out.push('\t');
                label_text(&mut out, fst.osymbols(), a.olabel);
            }
            if !kind.is_one(a.weight) {
                let _ = write!(out, "\t{}", a.weight);
            }
            out.push('\n');
        }
        if s == start && !fst.is_final(s) && fst.arcs(s).is_empty() {
            let _ = writeln!(out, "{s}\t{}", kind.zero());
        } else if fst.is_final(s) {
            let w = fst.final_weight(s);
            if kind.is_one(w) {
                let _ = writeln!(out, "{s}");
            } else {
                let _ = writeln!(out, "{s}\t{w}");
            }
        }
    }
    out
}
