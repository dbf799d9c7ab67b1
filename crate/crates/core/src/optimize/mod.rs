//! Determinization, pushing, minimization and equivalence.
//!
//! Supported for the tropical and boolean semirings; the real semiring is
//! rejected because these constructions pick a single best alternative.

mod determinize;
mod epsilon;
mod equivalent;
mod local;
mod minimize;
mod push;
pub(crate) mod seq;
mod twins;

pub use determinize::{determinize, determinize_with, DEFAULT_EXPANSION_CAP};
pub use epsilon::rm_epsilon;
pub use equivalent::equivalent;
pub use local::local_determinize;
pub use minimize::minimize;
pub use push::{push, PushMode};
pub use twins::{twins_test, TwinReport, TwinWitness};

pub(crate) use push::distance_to_final;
