//! N-gram counting, Katz back-off estimation and back-off acceptors.
//!
//! Costs are natural-log negated probabilities; the ARPA dump uses log10.

mod arpa;
mod counts;
mod fsa;
mod model;

pub use counts::{count_ngrams, good_turing, CountOptions, CountTable, FrequencyOfFrequencies, BOS, EOS, UNK};
pub use fsa::build_lm_fsa;
pub use model::{katz_model, katz_model_with, BackoffModel, Degeneracy, KatzOptions, DEFAULT_K_THRESHOLD};
