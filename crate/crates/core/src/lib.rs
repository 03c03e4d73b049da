//! Bounded logical inference over relational data with imperfect rules.
//!
//! The crate implements k-entailment and voting entailment over masked
//! (partially observed) examples, the fragment-frequency accuracy `Q` of a
//! theory, closed-form worst-case and PAC error bounds, and a sampling harness
//! that checks those bounds empirically.

pub mod bounds;
pub mod error;
pub mod example;
pub mod fragments;
pub mod harness;
pub mod logic;
pub mod masking;
pub mod reasoner;
pub mod sampling;
pub mod sat;

pub use error::{Error, Result};
pub use example::{parse_example, Example};
pub use fragments::{q_exact, q_monte_carlo, restrict, Fragment, ProbabilityEstimate};
pub use logic::{
    evaluate, parse_formula, parse_theory, Formula, GroundAtom, GroundLiteral, Predicate, Theory,
};
pub use masking::{apply_mask, mask_restrict, parse_masked_example, MaskedExample, Masker};
