//! Concrete atom-structure families: partition structures for the
//! atomic games, finitely supported sequences over a field, and graph
//! machinery with exact chromatic certificates.

pub mod graph;
pub mod partition;
pub mod vecatom;

pub use graph::{chromatic_number, classify_graph, graph_sequence, Graph, GraphClass, GraphKind};
pub use partition::{build_partition_pair, PartitionStructure};
pub use vecatom::VecAtom;
