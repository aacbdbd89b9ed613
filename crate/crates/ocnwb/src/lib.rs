//! A workbench for simulation and trace-inclusion problems on one-counter
//! nets: the weak-to-strong reduction through guarded ω-nets, approximant
//! game solvers with ordinal ranks below ω², certified fixpoint checks,
//! comparisons against finite systems, and weighted-automaton trace
//! encodings. See the README for the file format and CLI.

pub mod corpus;
pub mod finite;
pub mod format;
pub mod games;
pub mod nets;
pub mod reduction;
pub mod traces;
