//! Binary CSP under structural parameterizations: exact solvers, the
//! parameter-preserving reductions to and from weighted satisfiability,
//! alternating read-once stack machines, universal trees and logic
//! encodings, each checked against brute-force oracles.

pub mod error;
pub mod formulas;
pub mod reductions;
pub mod graph;
pub mod campaign;
pub mod instance;
pub mod io;
pub mod logic;
pub mod machine;
pub mod solvers;
pub mod structure;
pub mod tree;
pub mod unitrees;

pub use error::{Error, Result};
pub use graph::Graph;
pub use instance::{check_assignment, Assignment, BinCsp, ListColoring, Precoloring, Value};
