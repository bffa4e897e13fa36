//! Partial matching width, witnessing matchings on tree-of-copies graphs,
//! the CNF family of graph edges, solution-counting decision trees, and
//! nondeterministic read-once branching programs.

pub mod cnf;
pub mod constructive;
pub mod error;
pub mod graph;
pub mod matching;
pub mod nrobp;
pub mod oracle;
pub mod scdt;
pub mod width;

pub use error::{Error, Result};
pub use graph::{Graph, ProductGraph, Role, RolePartition, TernaryTree};
pub use matching::Matching;
pub use width::WitnessingMatching;
