//! BioAmbients processes: terms, reduction semantics, and a contents/bindings flow analysis.

pub mod ast;
pub mod cfa;
pub mod output;
pub mod parser;
pub mod semantics;
pub mod verify;

#[cfg(test)]
pub(crate) mod fixtures;
