//! ARPA-style text: `\data\` with `ngram k=count` lines, then one
//! `\k-grams:` section per order holding `log10 P<TAB>words[<TAB>log10 α]`
//! lines, and `\end\`. `<s>` is listed with probability `-99`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::counts::{BOS, UNK};
use super::model::BackoffModel;
use crate::error::{Error, Result};
use crate::fst::{Label, SymbolTable};

const NO_PROB: f64 = -99.0;

fn log10(p: f64) -> f64 {
    if p > 0.0 {
        p.log10()
    } else {
        NO_PROB
    }
}

impl BackoffModel {
    pub fn write_arpa(&self) -> String {
        let bos = self.symbols.find_label(BOS);
        let mut levels: Vec<Vec<(Vec<Label>, f64)>> = vec![Vec::new(); self.order];
        if let Some(b) = bos {
            levels[0].push((vec![b], f64::NAN));
        }
        for (g, &p) in &self.probs {
            levels[g.len() - 1].push((g.clone(), p));
        }
        for level in &mut levels {
            level.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let mut out = String::from("\\data\\\n");
        for (k, level) in levels.iter().enumerate() {
            let _ = writeln!(out, "ngram {}={}", k + 1, level.len());
        }
        for (k, level) in levels.iter().enumerate() {
            let _ = write!(out, "\n\\{}-grams:\n", k + 1);
            for (g, p) in level {
                let lp = if p.is_nan() { NO_PROB } else { log10(*p) };
                let _ = write!(out, "{lp}\t{}", self.words(g));
                if let Some(&a) = self.alphas.get(g) {
                    let _ = write!(out, "\t{}", log10(a));
                }
                out.push('\n');
            }
        }
        out.push_str("\n\\end\\\n");
        out
    }

    pub fn read_arpa(text: &str) -> Result<BackoffModel> {
        let mut symbols = SymbolTable::new();
        let mut probs = BTreeMap::new();
        let mut alphas = BTreeMap::new();
        let mut order = 0;
        let mut section: Option<usize> = None;
        let mut ended = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |m: &str| Error::Parse {
                line: i + 1,
                message: m.into(),
            };
            if line.is_empty() || line == "\\data\\" {
                continue;
            }
            if line == "\\end\\" {
                ended = true;
                break;
            }
            if let Some(rest) = line.strip_prefix("ngram ") {
                let (k, _) = rest.split_once('=').ok_or_else(|| err("expected `ngram k=count`"))?;
                order = order.max(k.trim().parse::<usize>().map_err(|_| err("bad order"))?);
                continue;
            }
            if let Some(k) = line.strip_prefix('\\').and_then(|l| l.strip_suffix("-grams:")) {
                section = Some(k.parse().map_err(|_| err("bad section header"))?);
                continue;
            }
            let k = section.ok_or_else(|| err("entry outside a section"))?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(err("expected `log10P<TAB>words[<TAB>log10α]`"));
            }
            let lp: f64 = fields[0].trim().parse().map_err(|_| err("bad probability"))?;
            let gram: Vec<Label> = fields[1].split_whitespace().map(|w| symbols.add_symbol(w)).collect();
            if gram.len() != k {
                return Err(err("gram length does not match its section"));
            }
            if let Some(a) = fields.get(2) {
                let la: f64 = a.trim().parse().map_err(|_| err("bad back-off weight"))?;
                alphas.insert(gram.clone(), if la <= NO_PROB { 0.0 } else { 10f64.powf(la) });
            }
            let is_bos = k == 1 && fields[1].trim() == BOS;
            if !is_bos && lp > NO_PROB {
                probs.insert(gram, 10f64.powf(lp));
            }
        }
        if !ended {
            return Err(Error::Parse {
                line: text.lines().count().max(1),
                message: "missing `\\end\\`".into(),
            });
        }
        if order == 0 {
            return Err(Error::Parse {
                line: 1,
                message: "no n-gram sections".into(),
            });
        }
        symbols.add_symbol(UNK);
        Ok(BackoffModel {
            order,
            symbols,
            probs,
            alphas,
        })
    }
}

#[cfg(test)]
mod tests {
    use crate::ngram::{count_ngrams, katz_model_with, BackoffModel, CountOptions, Degeneracy, KatzOptions};

    #[test]
    fn arpa_round_trip_preserves_scores() {
        let ct = count_ngrams("a b a b a c\nb a c c\nc a b", CountOptions::new(3)).unwrap();
        let opts = KatzOptions {
            degeneracy: Degeneracy::Renormalize,
            ..KatzOptions::default()
        };
        let m = katz_model_with(&ct, opts).unwrap();
        let text = m.write_arpa();
        let back = BackoffModel::read_arpa(&text).unwrap();
        assert_eq!(back.write_arpa(), text);
        for s in [&["a", "b"][..], &["c", "c", "a"], &["z"]] {
            let (x, y) = (back.cost_of_words(s), m.cost_of_words(s));
            assert!(x == y || (x - y).abs() < 1e-9, "{s:?}: {x} vs {y}");
        }
        assert!(text.starts_with("\\data\\\nngram 1="));
        assert!(BackoffModel::read_arpa("\\data\\\n").is_err());
    }
}
