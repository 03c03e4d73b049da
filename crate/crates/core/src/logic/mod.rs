//! Syntax, parsing and closed-world model checking of function-free first-order logic.

pub mod eval;
pub mod parser;
pub mod syntax;

pub use eval::{evaluate, evaluate_on, evaluate_theory, CompiledFormula, CompiledTheory};
pub use parser::{parse_formula, parse_ground_literal, parse_theory, parse_theory_with, TheoryOptions};
pub use syntax::{
    Atom, Formula, GroundAtom, GroundLiteral, Literal, Matrix, Predicate, Quantifier, Term, Theory,
    Vocabulary,
};
