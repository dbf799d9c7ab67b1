//! Context-dependent rewrite rules compiled to transducers.

mod apply;
mod compile;
mod file;
mod marker;
mod regex;
mod tree;

pub use apply::{apply_rewrite, ApplyMode};
pub use compile::{compile_rule, Rule};
pub use file::RuleSet;
pub use marker::{marker, MarkerType};
pub use regex::{compile_regex, Grammar, Regex};
pub use tree::{intersect_samelength, DecisionForest, Side, TreeNode};
