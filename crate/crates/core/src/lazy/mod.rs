//! On-demand machine views.

mod cache;
mod compose;

pub use cache::{CacheDiscipline, Cached};
pub use compose::LazyCompose;
