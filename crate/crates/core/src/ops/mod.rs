//! Rational operations on machines.

mod compose;
mod rational;

pub use compose::{compose, compose_with, intersect, ComposeFilter, FilterState};
pub use rational::{closure, complement, concat, difference, project, reverse, union, ProjectSide};

pub(crate) use compose::{check_kinds, moves, Move};
