//! Sumsets over integers, lattices, residues, permutation groups, and
//! intersection semigroups, with exact verifiers for the cardinality
//! inequalities relating `|A_1 + ... + A_k|` to its leave-one-out sumsets.

pub mod algebra;
pub mod cli;
pub mod engine;
pub mod error;
pub mod instance;
pub mod report;
pub mod search;
pub mod set;
pub mod sumset;
pub mod theorems;

pub use algebra::{AmbientStructure, Element, Permutation};
pub use error::{Result, SumsetError};
pub use instance::Instance;
pub use report::InequalityReport;
pub use set::{AdditionGraph, FiniteSet};
