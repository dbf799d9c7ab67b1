use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::{Label, EPSILON, EPSILON_SYMBOL};
use crate::error::{Error, Result};

pub type SymbolsRef = std::sync::Arc<SymbolTable>;

/// Bijection between textual symbols and label ids. Id 0 is always `<eps>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    by_id: BTreeMap<Label, String>,
    by_name: HashMap<String, Label>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut t = SymbolTable {
            by_id: BTreeMap::new(),
            by_name: HashMap::new(),
        };
        t.by_id.insert(EPSILON, EPSILON_SYMBOL.to_string());
        t.by_name.insert(EPSILON_SYMBOL.to_string(), EPSILON);
        t
    }

    /// Table holding `<eps>` plus `symbols` numbered from 1 in order.
    pub fn from_symbols<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut t = SymbolTable::new();
        for s in symbols {
            t.add_symbol(s.as_ref());
        }
        t
    }

    /// Returns the id of `symbol`, assigning the next free id if it is new.
    pub fn add_symbol(&mut self, symbol: &str) -> Label {
        if let Some(&id) = self.by_name.get(symbol) {
            return id;
        }
        let id = self.next_id();
        self.by_id.insert(id, symbol.to_string());
        self.by_name.insert(symbol.to_string(), id);
        id
    }

    pub fn add_symbol_with_id(&mut self, symbol: &str, id: Label) -> Result<()> {
        match (self.by_name.get(symbol), self.by_id.get(&id)) {
            (Some(&existing), _) if existing == id => Ok(()),
            (None, None) => {
                self.by_id.insert(id, symbol.to_string());
                self.by_name.insert(symbol.to_string(), id);
                Ok(())
            }
            _ => Err(Error::Symbol(format!(
                "`{symbol}`/{id} conflicts with an existing entry"
            ))),
        }
    }

    pub fn next_id(&self) -> Label {
        self.by_id.keys().next_back().map_or(1, |&m| m + 1)
    }

    pub fn find_label(&self, symbol: &str) -> Option<Label> {
        self.by_name.get(symbol).copied()
    }

    pub fn find_symbol(&self, label: Label) -> Option<&str> {
        self.by_id.get(&label).map(String::as_str)
    }

    pub fn label(&self, symbol: &str) -> Result<Label> {
        self.find_label(symbol)
            .ok_or_else(|| Error::Symbol(format!("unknown symbol `{symbol}`")))
    }

    pub fn symbol(&self, label: Label) -> Result<&str> {
        self.find_symbol(label)
            .ok_or_else(|| Error::Symbol(format!("label {label} has no symbol")))
    }

    pub fn len(&self) -> usize {
        self.by_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_id.len() <= 1
    }

    /// `(label, symbol)` pairs in ascending label order, ε included.
    pub fn iter(&self) -> impl Iterator<Item = (Label, &str)> {
        self.by_id.iter().map(|(&l, s)| (l, s.as_str()))
    }

    /// Every non-ε label.
    pub fn labels(&self) -> Vec<Label> {
        self.by_id.keys().copied().filter(|&l| l != EPSILON).collect()
    }

    /// Parses `symbol<TAB>id` lines. The table must map `<eps>` to 0.
    ///
    /// A line starting with `#` is a comment unless it is itself a
    /// `symbol id` pair, so `#` can still be used as a symbol.
    pub fn read_text(text: &str) -> Result<Self> {
        let mut t = SymbolTable {
            by_id: BTreeMap::new(),
            by_name: HashMap::new(),
        };
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            let mut fields = trimmed.split_whitespace();
            let is_pair = {
                let mut f = fields.clone();
                f.next().is_some() && f.next().is_some_and(|id| id.parse::<Label>().is_ok()) && f.next().is_none()
            };
            if trimmed.is_empty() || (trimmed.starts_with('#') && !is_pair) {
                continue;
            }
            let (Some(sym), Some(id), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected `symbol<TAB>id`".into(),
                });
            };
            let id: Label = id.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad symbol id `{id}`"),
            })?;
            t.add_symbol_with_id(sym, id).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        }
        if t.find_label(EPSILON_SYMBOL) != Some(EPSILON) {
            return Err(Error::Symbol("symbol table must contain `<eps>\t0`".into()));
        }
        Ok(t)
    }

    pub fn write_text(&self) -> String {
        let mut out = String::new();
        for (id, sym) in &self.by_id {
            let _ = writeln!(out, "{sym}\t{id}");
        }
        out
    }
}
