//! Weighted finite-state acceptors and transducers over the boolean,
//! tropical and real semirings.
//!
//! The crate is organised bottom-up:
//!
//! - [`semiring`]: weight algebras.
//! - [`fst`]: the machine type, text format, trimming and a brute-force
//!   path-weight oracle.
//! - [`ops`]: composition and the other rational operations.
//! - [`optimize`]: determinization, pushing, minimization, equivalence.
//! - [`lazy`]: on-demand composition and state caches.
//! - [`rewrite`]: regular expressions and context-dependent rewrite rules.
//! - [`ngram`]: counting, Good-Turing/Katz estimation, back-off acceptors.
//! - [`decode`]: shortest distances, best paths, beam search, lattices.
//!
//! ```
//! use wfst::decode::best_path;
//! use wfst::ops::compose;
//! use wfst::{Fst, Semiring};
//!
//! let a = Fst::linear(Semiring::Tropical, &[1, 2]);
//! let b = Fst::sigma_star(Semiring::Tropical, &[1, 2]);
//! let path = best_path(&compose(&a, &b)?)?;
//! assert_eq!(path.output, vec![1, 2]);
//! # Ok::<(), wfst::Error>(())
//! ```

pub mod decode;
pub mod error;
pub mod fst;
pub mod lazy;
pub mod ngram;
pub mod ops;
pub mod optimize;
pub mod rewrite;
pub mod semiring;

pub use error::{Error, Result};
pub use fst::{Arc, Fst, Label, StateId, SymbolTable, SymbolsRef, EPSILON};
pub use semiring::{Semiring, Weight};
