//! Rule files.
//!
//! ```text
//! # comment
//! Alphabet = [m i s z o $ #]
//! Class VStop = [b d g m]
//! s -> z / _ ($|#)VStop ;
//! ```
//!
//! Declarations take one line. Rules end with `;` and may span lines; the
//! context part `/ lambda _ rho` is optional. Without an `Alphabet` line the
//! alphabet is every symbol mentioned in the file.

use super::compile::{compile_rule, Rule};
use super::regex::Grammar;
use crate::error::{Error, Result};
use crate::fst::Fst;
use crate::ops::compose;

#[derive(Debug, Clone)]
pub struct RuleSet {
    pub grammar: Grammar,
    pub rules: Vec<Rule>,
}

/// Position of the first `pat` outside escapes, braces and weights.
pub(crate) fn find_unescaped(s: &str, pat: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    let mut i = 0;
    let mut depth = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                i += 2;
                continue;
            }
            b'{' => depth += 1,
            b'}' => depth -= 1,
            b'<' if depth == 0 && !s[i..].starts_with(pat) => depth += 1,
            b'>' if depth > 0 && bytes.get(i.wrapping_sub(1)) != Some(&b'-') => depth -= 1,
            _ => {}
        }
        if depth == 0 && s[i..].starts_with(pat) {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// `[a b c]` members of a declaration.
fn members(text: &str, line: usize) -> Result<Vec<&str>> {
    let t = text.trim().trim_end_matches(';').trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| Error::Parse {
            line,
            message: "expected `[symbol ...]`".into(),
        })?;
    Ok(inner.split_whitespace().collect())
}

impl RuleSet {
    pub fn parse(text: &str) -> Result<RuleSet> {
        let mut grammar = Grammar::new();
        let mut rules = Vec::new();
        let mut pending = String::new();
        let mut pending_line = 1;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if pending.trim().is_empty() {
                if let Some(rest) = trimmed.strip_prefix("Alphabet") {
                    let rest = rest.trim_start().strip_prefix('=').ok_or_else(|| Error::Parse {
                        line,
                        message: "expected `Alphabet = [...]`".into(),
                    })?;
                    for m in members(rest, line)? {
                        grammar.symbol(m).map_err(|e| at(line, e))?;
                    }
                    grammar.close();
                    continue;
                }
                if let Some(rest) = trimmed.strip_prefix("Class ") {
                    let (name, body) = rest.split_once('=').ok_or_else(|| Error::Parse {
                        line,
                        message: "expected `Class NAME = [...]`".into(),
                    })?;
                    grammar
                        .define_class(name.trim(), &members(body, line)?)
                        .map_err(|e| at(line, e))?;
                    continue;
                }
                pending_line = line;
            }
            pending.push_str(raw);
            pending.push('\n');
            while let Some(end) = find_unescaped(&pending, ";") {
                let stmt: String = pending[..end].to_string();
                pending = pending[end + 1..].to_string();
                if !stmt.trim().is_empty() {
                    rules.push(parse_rule(&mut grammar, &stmt).map_err(|e| at(pending_line, e))?);
                }
                pending_line = line;
            }
        }
        if !pending.trim().is_empty() {
            return Err(Error::Parse {
                line: pending_line,
                message: "rule is missing its `;`".into(),
            });
        }
        grammar.close();
        Ok(RuleSet { grammar, rules })
    }

    /// The rules applied one after the other.
    pub fn compile(&self) -> Result<Fst> {
        let mut out: Option<Fst> = None;
        for r in &self.rules {
            let f = compile_rule(r, &self.grammar)?;
            out = Some(match out {
                None => f,
                Some(acc) => compose(&acc, &f)?,
            });
        }
        out.ok_or_else(|| Error::Config("rule file has no rules".into()))
    }
}

fn at(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { message, .. } => Error::Parse { line, message },
        Error::Symbol(message) => Error::Parse { line, message },
        other => other,
    }
}

fn parse_rule(g: &mut Grammar, stmt: &str) -> Result<Rule> {
    let arrow = find_unescaped(stmt, "->").ok_or_else(|| Error::Parse {
        line: 0,
        message: "expected `phi -> psi`".into(),
    })?;
    let phi = &stmt[..arrow];
    let rest = &stmt[arrow + 2..];
    let (psi, lambda, rho) = match find_unescaped(rest, "/") {
        None => (rest, "()", "()"),
        Some(slash) => {
            let ctx = &rest[slash + 1..];
            let under = find_unescaped(ctx, "_").ok_or_else(|| Error::Parse {
                line: 0,
                message: "context needs `_`".into(),
            })?;
            (&rest[..slash], &ctx[..under], &ctx[under + 1..])
        }
    };
    Rule::parse(g, phi, psi, lambda, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::{apply_rewrite, ApplyMode};

    #[test]
    fn voicing_example() {
        let text = "# voicing\nAlphabet = [m i s z o $ # b]\nClass VStop = [b m]\ns -> z / _ ($|#)VStop ;\n";
        let set = RuleSet::parse(text).unwrap();
        let f = set.compile().unwrap();
        let syms = set.grammar.symbols();
        let input: Vec<_> = "mis$mo$".chars().map(|c| syms.label(&c.to_string()).unwrap()).collect();
        let out = apply_rewrite(&f, &input, ApplyMode::All).unwrap();
        let text: String = out[0].0.iter().map(|&l| syms.symbol(l).unwrap()).collect();
        assert_eq!(out.len(), 1);
        assert_eq!(text, "miz$mo$");
    }

    #[test]
    fn syntax_errors_carry_lines() {
        assert!(matches!(
            RuleSet::parse("a -> b / c b ;"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(RuleSet::parse("\na -> b"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            RuleSet::parse("Alphabet = [a b]\na -> z ;"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn escapes_and_weights_do_not_split() {
        assert_eq!(find_unescaped("a\\_b _ c", "_"), Some(5));
        assert_eq!(find_unescaped("<0.5>a -> b", "->"), Some(7));
        assert_eq!(find_unescaped("{x_y} _", "_"), Some(6));
        let set = RuleSet::parse("a -> <1>b | <2>c ;").unwrap();
        assert_eq!(set.rules.len(), 1);
    }
}
