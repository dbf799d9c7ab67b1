use thiserror::Error;

use crate::semiring::Semiring;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A weight outside its semiring's carrier, or an undefined operation on it.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("symbol error: {0}")]
    Symbol(String),

    #[error("semiring mismatch: {0} vs {1}")]
    KindMismatch(Semiring, Semiring),

    #[error("operation `{op}` does not support the {kind} semiring")]
    UnsupportedKind { op: &'static str, kind: Semiring },

    /// A precondition of the called operation does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("expansion cap of {cap} states exceeded; the input may not be determinizable (run the twins test)")]
    CapExceeded { cap: usize },

    #[error("machine is not functional: {0}")]
    NonFunctional(String),

    #[error("path enumeration diverges: {0}")]
    Divergence(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical degeneracy in context `{context}`: {message}")]
    Degenerate { context: String, message: String },

    #[error("no accepting path")]
    NoPath,

    #[error("no hypothesis survived the beam; try a wider beam")]
    BeamExhausted,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
