//! Synthesis, execution and determinization of runtime monitors for
//! Hennessy-Milner logic with recursion.

pub mod automata;
pub mod equivalence;
pub mod error;
pub mod families;
pub mod gen;
pub mod logic;
pub mod lts;
pub mod pipeline;
pub mod semantics;
pub mod synthesis;
pub mod terms;
pub mod verdicts;

pub use error::{Error, Result};
