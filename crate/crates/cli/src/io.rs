//! Reading and writing machines, symbol tables and plain text.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use wfst::fst::{read_text, write_text, TextOptions};
use wfst::{Fst, Semiring, SymbolTable, SymbolsRef};

pub fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn read_symbols(path: &Path) -> Result<SymbolsRef> {
    let text = read_input(path)?;
    let table = SymbolTable::read_text(&text).with_context(|| format!("symbol table {}", path.display()))?;
    Ok(Arc::new(table))
}

fn sidecar(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(ext);
    PathBuf::from(s)
}

/// How to interpret machine files.
#[derive(Debug, Clone, Default)]
pub struct MachineFormat {
    pub semiring: Semiring,
    pub isyms: Option<PathBuf>,
    pub osyms: Option<PathBuf>,
    pub acceptor: bool,
}

impl MachineFormat {
    /// Reads a machine. Symbol tables come from the flags, else from
    /// `<path>.isyms` / `<path>.osyms` files next to it.
    pub fn read(&self, path: &Path) -> Result<Fst> {
        let table = |flag: &Option<PathBuf>, ext: &str| -> Result<Option<SymbolsRef>> {
            if let Some(p) = flag {
                return read_symbols(p).map(Some);
            }
            let side = sidecar(path, ext);
            if path.as_os_str() != "-" && side.exists() {
                return read_symbols(&side).map(Some);
            }
            Ok(None)
        };
        let isyms = table(&self.isyms, ".isyms")?;
        let osyms = table(&self.osyms, ".osyms")?;
        let text = read_input(path)?;
        let opts = TextOptions::new(self.semiring)
            .with_symbols(isyms, osyms)
            .acceptor(self.acceptor);
        read_text(&text, &opts).with_context(|| format!("machine {}", path.display()))
    }
}

/// Writes a machine in canonical text, plus symbol-table files beside it
/// when writing to a named file.
pub fn write_machine(path: Option<&Path>, fst: &Fst) -> Result<()> {
    write_output(path, &write_text(fst))?;
    if let Some(p) = path.filter(|p| p.as_os_str() != "-") {
        if let Some(t) = fst.isymbols() {
            write_output(Some(&sidecar(p, ".isyms")), &t.write_text())?;
        }
        if let Some(t) = fst.osymbols() {
            write_output(Some(&sidecar(p, ".osyms")), &t.write_text())?;
        }
    }
    Ok(())
}

/// Graphviz rendering for quick inspection.
pub fn dot(fst: &Fst) -> String {
    use std::fmt::Write as _;
    let name = |t: Option<&SymbolsRef>, l: u32| -> String {
        t.and_then(|t| t.find_symbol(l).map(str::to_string))
            .unwrap_or_else(|| l.to_string())
    };
    let kind = fst.semiring();
    let mut out = String::from("digraph fst {\n  rankdir = LR;\n");
    for q in fst.states() {
        let shape = if fst.is_final(q) { "doublecircle" } else { "circle" };
        let style = if fst.start() == Some(q) { ", style = bold" } else { "" };
        let label = if fst.is_final(q) && !kind.is_one(fst.final_weight(q)) {
            format!("{q}/{}", fst.final_weight(q))
        } else {
            q.to_string()
        };
        let _ = writeln!(out, "  {q} [label = \"{label}\", shape = {shape}{style}];");
    }
    for q in fst.states() {
        for a in fst.arcs(q) {
            let mut label = name(fst.isymbols(), a.ilabel);
            if !fst.is_acceptor() {
                label = format!("{label}:{}", name(fst.osymbols(), a.olabel));
            }
            if !kind.is_one(a.weight) {
                label = format!("{label}/{}", a.weight);
            }
            let _ = writeln!(
                out,
                "  {q} -> {} [label = \"{}\"];",
                a.nextstate,
                label.replace('"', "\\\"")
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Resolves space-separated tokens against `table`, or parses numeric
/// labels when there is none.
pub fn tokens_to_labels(table: Option<&SymbolsRef>, text: &str) -> Result<Vec<u32>> {
    text.split_whitespace()
        .map(|t| match table {
            Some(tab) => Ok(tab.label(t)?),
            None => t
                .parse::<u32>()
                .with_context(|| format!("`{t}` is not a numeric label")),
        })
        .collect()
}

pub fn labels_to_text(table: Option<&SymbolsRef>, labels: &[u32]) -> String {
    let words: Vec<String> = labels
        .iter()
        .map(|&l| {
            table
                .and_then(|t| t.find_symbol(l).map(str::to_string))
                .unwrap_or_else(|| l.to_string())
        })
        .collect();
    words.join(" ")
}
