//! Evaluation of formulas over finite LTSs, systems of equations, and the
//! formula-level determinization pipeline for the safety fragment.

mod determinize;
mod eval;
mod standard;
mod system;

pub use determinize::{
    determinize_formula, determinize_system, is_deterministic_form, is_deterministic_system,
    system_to_formula,
};
pub use eval::{eval_formula, Environment, StateSet};
pub use standard::{formula_to_system, is_standard_form, is_standard_system, to_standard_form};
pub use system::{eval_system, solve_recursive_all, solve_simultaneous, EquationSystem};
