//! Partition comparison, spanning trees and synthetic test sets.

mod ari;
mod mst;
mod synthetic;

pub use ari::adjusted_rand_index;
pub use mst::{minimum_spanning_tree, MstEdge, MstEdgeList};
pub use synthetic::{generate_blobs, generate_circles, BLOB_SEPARATION_FACTOR};
