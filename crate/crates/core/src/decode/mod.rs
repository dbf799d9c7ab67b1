//! Shortest paths, beam search and lattice operations.

mod beam;
mod lattice;
mod shortest;

pub use beam::{beam_decode, Decoded};
pub use lattice::{lattice_prune, rescore};
pub use shortest::{best_path, shortest_distance, shortest_distance_to_final, Path, ShortestPathAlgo};
