use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fst::{Label, SymbolTable};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    pub order: usize,
    /// Pads every sentence with `<s>` and `</s>`.
    pub boundaries: bool,
}

impl CountOptions {
    pub fn new(order: usize) -> Self {
        CountOptions {
            order,
            boundaries: true,
        }
    }

    pub fn without_boundaries(mut self) -> Self {
        self.boundaries = false;
        self
    }
}

/// Counts of every k-gram, `1 <= k <= order`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    order: usize,
    boundaries: bool,
    symbols: SymbolTable,
    counts: BTreeMap<Vec<Label>, u64>,
    tokens: u64,
}

/// `r ↦ n_r`: how many grams occurred exactly `r` times.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrequencyOfFrequencies(pub BTreeMap<u64, u64>);

impl FrequencyOfFrequencies {
    pub fn n(&self, r: u64) -> u64 {
        self.0.get(&r).copied().unwrap_or(0)
    }
}

impl CountTable {
    pub fn new(opts: CountOptions) -> Result<Self> {
        if opts.order == 0 {
            return Err(Error::Config("n-gram order must be at least 1".into()));
        }
        let mut symbols = SymbolTable::new();
        if opts.boundaries {
            symbols.add_symbol(BOS);
            symbols.add_symbol(EOS);
        }
        Ok(CountTable {
            order: opts.order,
            boundaries: opts.boundaries,
            symbols,
            counts: BTreeMap::new(),
            tokens: 0,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn boundaries(&self) -> bool {
        self.boundaries
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    /// Unigram tokens that can be predicted: words, plus `</s>` when
    /// boundaries are on.
    pub fn tokens(&self) -> u64 {
        self.tokens
    }

    pub fn count(&self, gram: &[Label]) -> u64 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Label], u64)> {
        self.counts.iter().map(|(g, &c)| (g.as_slice(), c))
    }

    pub fn add_sentence<S: AsRef<str>>(&mut self, words: &[S]) {
        let mut seq = Vec::with_capacity(words.len() + 2);
        if self.boundaries {
            seq.push(self.symbols.label(BOS).expect("reserved"));
        }
        seq.extend(words.iter().map(|w| self.symbols.add_symbol(w.as_ref())));
        if self.boundaries {
            seq.push(self.symbols.label(EOS).expect("reserved"));
        }
        for i in 0..seq.len() {
            for k in 1..=self.order.min(seq.len() - i) {
                *self.counts.entry(seq[i..i + k].to_vec()).or_insert(0) += 1;
            }
        }
        self.tokens += seq.len() as u64 - if self.boundaries { 1 } else { 0 };
    }

    /// Counts of the grams of length `k` grouped by frequency.
    pub fn frequencies(&self, k: usize) -> FrequencyOfFrequencies {
        let bos = self.bos();
        let mut ff = BTreeMap::new();
        for (g, &c) in &self.counts {
            if g.len() == k && !(k == 1 && Some(g[0]) == bos) {
                *ff.entry(c).or_insert(0) += 1;
            }
        }
        FrequencyOfFrequencies(ff)
    }

    pub(crate) fn bos(&self) -> Option<Label> {
        self.symbols.find_label(BOS).filter(|_| self.boundaries)
    }

    /// Maximum-likelihood estimate: `c(w)/N` for a unigram, otherwise
    /// `c(x1..xn) / c(x1..xn-1)`.
    pub fn mle(&self, gram: &[Label]) -> Result<f64> {
        let (num, den) = match gram.len() {
            0 => return Err(Error::Domain("empty n-gram".into())),
            1 => (self.count(gram), self.tokens),
            n => (self.count(gram), self.count(&gram[..n - 1])),
        };
        if den == 0 {
            return Err(Error::Domain("conditional probability with an unseen history".into()));
        }
        Ok(num as f64 / den as f64)
    }

    pub fn labels(&self, words: &[&str]) -> Result<Vec<Label>> {
        words.iter().map(|w| self.symbols.label(w)).collect()
    }

    /// Text form: an `order` line, a `boundaries` line, then one
    /// `gram<TAB>count` line per gram, shortest grams first.
    pub fn write_text(&self) -> String {
        let mut out = format!(
            "order {}\nboundaries {}\n",
            self.order,
            if self.boundaries { "yes" } else { "no" }
        );
        let mut grams: Vec<(&Vec<Label>, &u64)> = self.counts.iter().collect();
        grams.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        for (g, c) in grams {
            let words: Vec<&str> = g.iter().map(|&l| self.symbols.find_symbol(l).unwrap_or("?")).collect();
            let _ = writeln!(out, "{}\t{c}", words.join(" "));
        }
        out
    }

    pub fn read_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let mut header = |key: &str| -> Result<String> {
            let (i, l) = lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("missing `{key}` line"),
            })?;
            l.strip_prefix(key)
                .map(|v| v.trim().to_string())
                .ok_or_else(|| Error::Parse {
                    line: i + 1,
                    message: format!("expected `{key} ...`"),
                })
        };
        let order: usize = header("order")?.parse().map_err(|_| Error::Parse {
            line: 1,
            message: "bad order".into(),
        })?;
        let boundaries = match header("boundaries")?.as_str() {
            "yes" => true,
            "no" => false,
            _ => {
                return Err(Error::Parse {
                    line: 2,
                    message: "boundaries must be yes or no".into(),
                })
            }
        };
        let mut t = CountTable::new(CountOptions { order, boundaries })?;
        let bos = t.bos();
        for (i, line) in lines {
            let err = |m: &str| Error::Parse {
                line: i + 1,
                message: m.into(),
            };
            let (gram, count) = line.rsplit_once('\t').ok_or_else(|| err("expected `gram<TAB>count`"))?;
            let count: u64 = count.trim().parse().map_err(|_| err("bad count"))?;
            let labels: Vec<Label> = gram.split_whitespace().map(|w| t.symbols.add_symbol(w)).collect();
            if labels.is_empty() || labels.len() > order {
                return Err(err("gram length outside 1..=order"));
            }
            if labels.len() == 1 && Some(labels[0]) != bos {
                t.tokens += count;
            }
            t.counts.insert(labels, count);
        }
        Ok(t)
    }
}

/// Counts a whitespace-tokenized corpus, one sentence per line.
pub fn count_ngrams(corpus: &str, opts: CountOptions) -> Result<CountTable> {
    let mut t = CountTable::new(opts)?;
    for line in corpus.lines() {
        let words: Vec<&str> = line.split_whitespace().collect();
        if !words.is_empty() {
            t.add_sentence(&words);
        }
    }
    Ok(t)
}

/// Good-Turing discounted count `(c + 1) n_{c+1} / n_c`, or `c` itself when
/// `c > k_threshold` or either frequency is zero.
pub fn good_turing(ff: &FrequencyOfFrequencies, c: u64, k_threshold: u64) -> f64 {
    let (nc, nc1) = (ff.n(c), ff.n(c + 1));
    if c == 0 || c > k_threshold || nc == 0 || nc1 == 0 {
        return c as f64;
    }
    (c + 1) as f64 * nc1 as f64 / nc as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(order: usize) -> CountOptions {
        CountOptions::new(order).without_boundaries()
    }

    #[test]
    fn unigram_counts() {
        let t = count_ngrams("a a", plain(1)).unwrap();
        let a = t.labels(&["a"]).unwrap();
        assert_eq!(t.count(&a), 2);
        assert_eq!(t.tokens(), 2);
        assert_eq!(t.mle(&a).unwrap(), 1.0);

        let t = count_ngrams("a b a b a c", plain(2)).unwrap();
        let l = t.labels(&["a", "b", "c"]).unwrap();
        assert_eq!([t.count(&l[0..1]), t.count(&l[1..2]), t.count(&l[2..3])], [3, 2, 1]);
        assert!((t.mle(&[l[0], l[1]]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.mle(&[l[1], l[1]]).unwrap(), 0.0);
        assert!(t.mle(&[99, l[0]]).is_err());
    }

    #[test]
    fn boundaries_pad_sentences() {
        let t = count_ngrams("a b\n\nb", CountOptions::new(2)).unwrap();
        let l = t.labels(&[BOS, EOS, "a", "b"]).unwrap();
        assert_eq!(t.count(&[l[0]]), 2);
        assert_eq!(t.count(&[l[3], l[1]]), 2);
        assert_eq!(t.tokens(), 5);
    }

    #[test]
    fn good_turing_formula_and_passthrough() {
        let ff = FrequencyOfFrequencies(BTreeMap::from([(1, 1), (2, 1)]));
        assert_eq!(good_turing(&ff, 1, 5), 2.0);
        assert_eq!(good_turing(&ff, 2, 5), 2.0);
        assert_eq!(good_turing(&ff, 1, 0), 1.0);
    }

    #[test]
    fn text_round_trip() {
        let t = count_ngrams("x y z\ny x", CountOptions::new(3)).unwrap();
        let text = t.write_text();
        let back = CountTable::read_text(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.write_text(), text);
    }
}
