use std::collections::{BTreeMap, BTreeSet};

use super::counts::{good_turing, CountTable, BOS, EOS, UNK};
use crate::error::{Error, Result};
use crate::fst::{Label, SymbolTable};

pub const DEFAULT_K_THRESHOLD: u64 = 5;

/// What to do with a history whose discounted mass has nowhere to go
/// because its seen words already carry all of the lower-order mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Degeneracy {
    /// Fail with [`Error::Degenerate`] naming the history.
    #[default]
    Error,
    /// Scale the seen words of that history back up to sum to one.
    Renormalize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KatzOptions {
    pub k_threshold: u64,
    pub degeneracy: Degeneracy,
}

impl Default for KatzOptions {
    fn default() -> Self {
        KatzOptions {
            k_threshold: DEFAULT_K_THRESHOLD,
            degeneracy: Degeneracy::Error,
        }
    }
}

const TINY: f64 = 1e-12;

/// Katz back-off model. Probabilities are natural, not logarithmic.
#[derive(Debug, Clone, PartialEq)]
pub struct BackoffModel {
    pub(crate) order: usize,
    pub(crate) symbols: SymbolTable,
    /// `P*(y | h)` keyed by `h y`, for every gram seen in training.
    pub(crate) probs: BTreeMap<Vec<Label>, f64>,
    /// `α(h)` for every history with seen continuations.
    pub(crate) alphas: BTreeMap<Vec<Label>, f64>,
}

/// Estimates a Katz model: Good-Turing discounting for counts up to
/// `k_threshold`, back-off weights normalizing each history.
///
/// A discounted count is used only when it lies strictly between zero and
/// the raw count; otherwise the raw count is kept. Unigram mass freed by
/// discounting goes to `<unk>`.
pub fn katz_model(ct: &CountTable, k_threshold: u64) -> Result<BackoffModel> {
    katz_model_with(
        ct,
        KatzOptions {
            k_threshold,
            ..KatzOptions::default()
        },
    )
}

pub fn katz_model_with(ct: &CountTable, opts: KatzOptions) -> Result<BackoffModel> {
    let k_threshold = opts.k_threshold;
    let mut symbols = ct.symbols().clone();
    let unk = symbols.add_symbol(UNK);
    let bos = ct.bos();
    let mut m = BackoffModel {
        order: ct.order(),
        symbols,
        probs: BTreeMap::new(),
        alphas: BTreeMap::new(),
    };
    let discount = |ff: &super::counts::FrequencyOfFrequencies, c: u64| {
        let d = good_turing(ff, c, k_threshold);
        if d > 0.0 && d < c as f64 {
            d
        } else {
            c as f64
        }
    };

    let n = ct.tokens() as f64;
    if n > 0.0 {
        let ff = ct.frequencies(1);
        let mut mass = 0.0;
        for (g, c) in ct.iter().filter(|(g, _)| g.len() == 1 && Some(g[0]) != bos) {
            let p = discount(&ff, c) / n;
            mass += p;
            m.probs.insert(g.to_vec(), p);
        }
        let left = 1.0 - mass;
        if left > TINY {
            m.probs.insert(vec![unk], left);
        }
    }

    for k in 2..=ct.order() {
        let ff = ct.frequencies(k);
        let mut by_history: BTreeMap<&[Label], Vec<(Label, u64)>> = BTreeMap::new();
        for (g, c) in ct.iter().filter(|(g, _)| g.len() == k) {
            by_history.entry(&g[..k - 1]).or_default().push((g[k - 1], c));
        }
        let mut level = Vec::new();
        for (h, conts) in by_history {
            let total: u64 = conts.iter().map(|c| c.1).sum();
            let mut seen_mass = 0.0;
            let mut lower_mass = 0.0;
            let first = level.len();
            for &(y, c) in &conts {
                let p = discount(&ff, c) / total as f64;
                seen_mass += p;
                lower_mass += m.prob(y, &h[1..]);
                level.push(([h, &[y]].concat(), p));
            }
            let num = 1.0 - seen_mass;
            let den = 1.0 - lower_mass;
            let alpha = if num <= TINY {
                0.0
            } else if den <= TINY {
                if opts.degeneracy == Degeneracy::Error {
                    return Err(Error::Degenerate {
                        context: m.words(h),
                        message: "back-off mass is positive but the lower order has none left".into(),
                    });
                }
                for entry in &mut level[first..] {
                    entry.1 /= seen_mass;
                }
                0.0
            } else {
                num / den
            };
            m.alphas.insert(h.to_vec(), alpha);
        }
        m.probs.extend(level);
    }
    Ok(m)
}

impl BackoffModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn boundaries(&self) -> bool {
        self.symbols.find_label(BOS).is_some()
    }

    pub(crate) fn words(&self, gram: &[Label]) -> String {
        let ws: Vec<&str> = gram
            .iter()
            .map(|&l| self.symbols.find_symbol(l).unwrap_or("?"))
            .collect();
        ws.join(" ")
    }

    pub fn alpha(&self, history: &[Label]) -> f64 {
        self.alphas.get(history).copied().unwrap_or(1.0)
    }

    /// `P(y | h)` with back-off; only the last `order - 1` symbols of `h`
    /// matter.
    pub fn prob(&self, y: Label, history: &[Label]) -> f64 {
        let keep = history.len().min(self.order - 1);
        let mut h = &history[history.len() - keep..];
        let mut scale = 1.0;
        loop {
            let mut g = h.to_vec();
            g.push(y);
            if let Some(&p) = self.probs.get(&g) {
                return scale * p;
            }
            if h.is_empty() {
                return 0.0;
            }
            scale *= self.alpha(h);
            h = &h[1..];
        }
    }

    /// The label scoring uses for `word`: itself if known, else `<unk>`.
    pub fn label(&self, word: &str) -> Label {
        self.symbols
            .find_label(word)
            .filter(|&l| self.probs.contains_key(&vec![l]))
            .unwrap_or_else(|| self.symbols.find_label(UNK).expect("models always define <unk>"))
    }

    /// Every label with non-zero unigram probability, `</s>` included.
    pub fn vocabulary(&self) -> Vec<Label> {
        self.probs.keys().filter(|g| g.len() == 1).map(|g| g[0]).collect()
    }

    /// Histories with seen continuations, shortest first; the empty history
    /// comes first.
    pub fn histories(&self) -> Vec<Vec<Label>> {
        let mut hs: BTreeSet<(usize, Vec<Label>)> = BTreeSet::from([(0, Vec::new())]);
        hs.extend(self.alphas.keys().map(|h| (h.len(), h.clone())));
        hs.into_iter().map(|(_, h)| h).collect()
    }

    /// `-ln P(sentence)`. With boundaries the sentence starts after `<s>`
    /// and includes the `</s>` prediction.
    pub fn cost(&self, sentence: &[Label]) -> f64 {
        let mut history = Vec::new();
        let mut seq = sentence.to_vec();
        if let (Some(bos), Some(eos)) = (self.symbols.find_label(BOS), self.symbols.find_label(EOS)) {
            history.push(bos);
            seq.push(eos);
        }
        let mut cost = 0.0;
        for y in seq {
            cost -= self.prob(y, &history).ln();
            history.push(y);
        }
        cost
    }

    pub fn cost_of_words(&self, words: &[&str]) -> f64 {
        let labels: Vec<Label> = words.iter().map(|w| self.label(w)).collect();
        self.cost(&labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::{count_ngrams, CountOptions};

    const TOY: &str = "a b a b a c\nb a c c\nc a b";

    fn toy(order: usize) -> BackoffModel {
        let ct = count_ngrams(TOY, CountOptions::new(order)).unwrap();
        let opts = KatzOptions {
            degeneracy: Degeneracy::Renormalize,
            ..KatzOptions::default()
        };
        katz_model_with(&ct, opts).unwrap()
    }

    #[test]
    fn degenerate_history_is_named() {
        let ct = count_ngrams(TOY, CountOptions::new(3)).unwrap();
        match katz_model(&ct, DEFAULT_K_THRESHOLD) {
            Err(Error::Degenerate { context, .. }) => assert_eq!(context, "b a"),
            other => panic!("expected a degenerate history, got {other:?}"),
        }
    }

    #[test]
    fn every_history_sums_to_one() {
        for order in 1..=3 {
            let m = toy(order);
            let vocab = m.vocabulary();
            for h in m.histories() {
                let s: f64 = vocab.iter().map(|&y| m.prob(y, &h)).sum();
                assert!((s - 1.0).abs() < 1e-9, "order {order} history {h:?} sums to {s}");
            }
        }
    }

    #[test]
    fn unseen_bigram_backs_off() {
        let m = toy(2);
        let a = m.label("a");
        let c = m.label("c");
        let eos = m.symbols.label(EOS).unwrap();
        // `c </s>` is seen once; `a </s>` never is.
        assert!(m.probs.contains_key(&vec![c, eos]));
        assert!(!m.probs.contains_key(&vec![a, a]));
        let expect = m.alpha(&[a]) * m.prob(a, &[]);
        assert!((m.prob(a, &[a]) - expect).abs() < 1e-15);
    }

    #[test]
    fn all_mass_seen_gives_zero_alpha() {
        // No count repeats, so nothing is discounted.
        let ct = count_ngrams("x y", CountOptions::new(2).without_boundaries()).unwrap();
        let m = katz_model(&ct, DEFAULT_K_THRESHOLD).unwrap();
        let x = m.label("x");
        assert_eq!(m.alpha(&[x]), 0.0);
        assert!((m.prob(m.label("y"), &[x]) - 1.0).abs() < 1e-12);
    }
}
