//! Cycle-canceling solver for the assignment problem and the asymmetric
//! travelling salesman problem.
//!
//! Vertices are 0-based throughout the library API. Every textual form
//! (cycle notation, matrix files, traces, reports) is 1-based.

pub mod cli;
pub mod cost;
pub mod cycle;
pub mod error;
pub mod example1;
pub mod fw;
pub mod greedy;
pub mod matrix;
pub mod oracles;
pub mod perm;
pub mod solve;
pub mod tour;

pub use cost::Cost;
pub use cycle::CycleCandidate;
pub use error::{Error, Result};
pub use matrix::{CostMatrix, MinOrderTable, ReducedMatrix};
pub use perm::{CycleForm, Permutation};
