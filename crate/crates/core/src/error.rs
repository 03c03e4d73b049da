use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("variable `{0}` is bound more than once in the quantifier prefix")]
    DuplicateBinding(String),

    #[error("constant `{0}` is not allowed in a constant-free theory")]
    ConstantNotAllowed(String),

    #[error("constant `{0}` is not in the domain")]
    ConstantOutsideDomain(String),

    #[error("predicate `{name}` used with arity {found}, expected {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),

    #[error("duplicate `domain:` declaration at line {0}")]
    DuplicateDomain(usize),

    #[error("missing `domain:` declaration")]
    MissingDomain,

    #[error("literal `{0}` appears with both signs")]
    ContradictoryLiteral(String),

    #[error("literal `{0}` is false in the example")]
    UntruthfulLiteral(String),

    #[error("subset is not contained in the domain (offending constant `{0}`)")]
    NotASubset(String),

    #[error("fragment size {k} exceeds domain size {domain}")]
    FragmentTooLarge { k: usize, domain: usize },

    #[error("target literal mentions {constants} distinct constants but k = {k}")]
    LiteralTooWide { constants: usize, k: usize },

    #[error("predicate arity {arity} exceeds k = {k}")]
    ArityExceedsK { arity: usize, k: usize },

    #[error("exact enumeration needs {required} subset evaluations, above the budget of {budget}; use Monte Carlo")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("theory contains constant `{0}`; eliminate constants first")]
    TheoryHasConstants(String),

    #[error("domain mismatch between test example and masked example")]
    DomainMismatch,

    #[error("auxiliary predicate `{0}` collides with an existing predicate")]
    NameCollision(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::UnboundVariable(_) => "unbound_variable",
            Error::DuplicateBinding(_) => "duplicate_binding",
            Error::ConstantNotAllowed(_) => "constant_not_allowed",
            Error::ConstantOutsideDomain(_) => "constant_outside_domain",
            Error::ArityMismatch { .. } => "arity_mismatch",
            Error::UnknownPredicate(_) => "unknown_predicate",
            Error::DuplicateDomain(_) => "duplicate_domain",
            Error::MissingDomain => "missing_domain",
            Error::ContradictoryLiteral(_) => "contradictory_literal",
            Error::UntruthfulLiteral(_) => "untruthful_literal",
            Error::NotASubset(_) => "not_a_subset",
            Error::FragmentTooLarge { .. } => "fragment_too_large",
            Error::LiteralTooWide { .. } => "literal_too_wide",
            Error::ArityExceedsK { .. } => "arity_exceeds_k",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::TheoryHasConstants(_) => "theory_has_constants",
            Error::DomainMismatch => "domain_mismatch",
            Error::NameCollision(_) => "name_collision",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
