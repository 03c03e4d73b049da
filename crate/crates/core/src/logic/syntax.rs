//! Abstract syntax of the function-free first-order language.
//!
//! Formulas are kept in prenex form: a quantifier prefix followed by a
//! quantifier-free matrix. Variables start with an uppercase letter,
//! constants with a lowercase one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Returns true for identifiers of the form `[a-zA-Z][a-zA-Z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn is_variable_name(s: &str) -> bool {
    is_identifier(s) && s.starts_with(|c: char| c.is_ascii_uppercase())
}

pub fn is_constant_name(s: &str) -> bool {
    is_identifier(s) && s.starts_with(|c: char| c.is_ascii_lowercase())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Predicate {
            name: name.into(),
            arity,
        }
    }

    /// Parses `name/arity`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, arity) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::InvalidParameter(format!("expected name/arity, got `{s}`")))?;
        if !is_identifier(name) {
            return Err(Error::InvalidParameter(format!(
                "`{name}` is not a predicate name"
            )));
        }
        let arity = arity
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad arity in `{s}`")))?;
        Ok(Predicate::new(name, arity))
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// A predicate-name to arity map that rejects conflicting arities.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    arities: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, arity: usize) -> Result<()> {
        match self.arities.get(name) {
            Some(&expected) if expected != arity => Err(Error::ArityMismatch {
                name: name.to_string(),
                expected,
                found: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn merge(&mut self, other: &Vocabulary) -> Result<()> {
        for (name, &arity) in &other.arities {
            self.insert(name, arity)?;
        }
        Ok(())
    }

    pub fn predicates(&self) -> Vec<Predicate> {
        self.arities
            .iter()
            .map(|(n, &a)| Predicate::new(n.clone(), a))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(String),
    Var(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) | Term::Var(c) => f.write_str(c),
        }
    }
}

/// An atom whose arguments may be variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    pub fn to_ground(&self) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom::new(self.predicate.clone(), args))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A literal over possibly non-ground atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<String>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// Distinct constants, sorted.
    pub fn constants(&self) -> BTreeSet<&str> {
        self.args.iter().map(String::as_str).collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        crate::logic::parser::parse_ground_literal(s).and_then(|l| {
            if l.positive {
                Ok(l.atom)
            } else {
                Err(Error::InvalidParameter(format!("`{s}` is not an atom")))
            }
        })
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundLiteral {
    pub atom: GroundAtom,
    pub positive: bool,
}

impl GroundLiteral {
    pub fn new(atom: GroundAtom, positive: bool) -> Self {
        GroundLiteral { atom, positive }
    }

    pub fn pos(predicate: &str, args: &[&str]) -> Self {
        Self::new(
            GroundAtom::new(predicate, args.iter().map(|s| s.to_string()).collect()),
            true,
        )
    }

    pub fn neg(predicate: &str, args: &[&str]) -> Self {
        Self::new(
            GroundAtom::new(predicate, args.iter().map(|s| s.to_string()).collect()),
            false,
        )
    }

    pub fn negated(&self) -> Self {
        Self::new(self.atom.clone(), !self.positive)
    }

    /// Parses `p(a,b)` or `!p(a,b)`.
    pub fn parse(s: &str) -> Result<Self> {
        crate::logic::parser::parse_ground_literal(s)
    }
}

impl fmt::Display for GroundLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        write!(f, "{}", self.atom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// Quantifier-free boolean combination of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Matrix {
    Atom(Atom),
    Not(Box<Matrix>),
    And(Vec<Matrix>),
    Or(Vec<Matrix>),
    Implies(Box<Matrix>, Box<Matrix>),
    Iff(Box<Matrix>, Box<Matrix>),
}

impl Matrix {
    pub fn atom(predicate: &str, args: Vec<Term>) -> Self {
        Matrix::Atom(Atom {
            predicate: predicate.to_string(),
            args,
        })
    }

    pub fn not(m: Matrix) -> Self {
        Matrix::Not(Box::new(m))
    }

    pub fn implies(a: Matrix, b: Matrix) -> Self {
        Matrix::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Matrix, b: Matrix) -> Self {
        Matrix::Iff(Box::new(a), Box::new(b))
    }

    /// Visits every atom in left-to-right order.
    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Atom)) {
        match self {
            Matrix::Atom(a) => f(a),
            Matrix::Not(m) => m.for_each_atom(f),
            Matrix::And(ms) | Matrix::Or(ms) => ms.iter().for_each(|m| m.for_each_atom(f)),
            Matrix::Implies(a, b) | Matrix::Iff(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
        }
    }

    pub(crate) fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Atom) -> Matrix {
        match self {
            Matrix::Atom(a) => Matrix::Atom(f(a)),
            Matrix::Not(m) => Matrix::not(m.map_atoms(f)),
            Matrix::And(ms) => Matrix::And(ms.iter().map(|m| m.map_atoms(f)).collect()),
            Matrix::Or(ms) => Matrix::Or(ms.iter().map(|m| m.map_atoms(f)).collect()),
            Matrix::Implies(a, b) => Matrix::implies(a.map_atoms(f), b.map_atoms(f)),
            Matrix::Iff(a, b) => Matrix::iff(a.map_atoms(f), b.map_atoms(f)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Matrix::Iff(..) => 1,
            Matrix::Implies(..) => 2,
            Matrix::Or(..) => 3,
            Matrix::And(..) => 4,
            Matrix::Not(..) | Matrix::Atom(..) => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = self.precedence();
        match self {
            Matrix::Atom(a) => write!(f, "{a}"),
            Matrix::Not(m) => {
                f.write_str("!")?;
                m.fmt_child(f, m.precedence() < 5)
            }
            Matrix::And(ms) | Matrix::Or(ms) => {
                let sep = if matches!(self, Matrix::And(_)) { " & " } else { " | " };
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    // Nested n-ary nodes of the same kind keep their parentheses
                    // so that printing does not flatten them.
                    m.fmt_child(f, m.precedence() <= prec)?;
                }
                Ok(())
            }
            Matrix::Implies(a, b) => {
                a.fmt_child(f, a.precedence() <= prec)?;
                f.write_str(" -> ")?;
                b.fmt_child(f, b.precedence() < prec)
            }
            Matrix::Iff(a, b) => {
                a.fmt_child(f, a.precedence() <= prec)?;
                f.write_str(" <-> ")?;
                b.fmt_child(f, b.precedence() <= prec)
            }
        }
    }
}

/// A closed formula in prenex normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Formula {
    prefix: Vec<(Quantifier, String)>,
    matrix: Matrix,
}

impl Formula {
    /// Builds a formula, checking that every matrix variable is bound exactly once.
    pub fn new(prefix: Vec<(Quantifier, String)>, matrix: Matrix) -> Result<Self> {
        let mut bound = BTreeSet::new();
        for (_, v) in &prefix {
            if !bound.insert(v.as_str()) {
                return Err(Error::DuplicateBinding(v.clone()));
            }
        }
        let mut unbound = None;
        matrix.for_each_atom(&mut |a| {
            for t in &a.args {
                if let Term::Var(v) = t {
                    if !bound.contains(v.as_str()) && unbound.is_none() {
                        unbound = Some(v.clone());
                    }
                }
            }
        });
        if let Some(v) = unbound {
            return Err(Error::UnboundVariable(v));
        }
        Ok(Formula { prefix, matrix })
    }

    pub fn prefix(&self) -> &[(Quantifier, String)] {
        &self.prefix
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.matrix.for_each_atom(&mut |a| {
            for t in &a.args {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            }
        });
        out
    }

    pub fn is_constant_free(&self) -> bool {
        self.constants().is_empty()
    }

    pub fn vocabulary(&self) -> Result<Vocabulary> {
        let mut vocab = Vocabulary::new();
        let mut err = None;
        self.matrix.for_each_atom(&mut |a| {
            if err.is_none() {
                if let Err(e) = vocab.insert(&a.predicate, a.args.len()) {
                    err = Some(e);
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(vocab),
        }
    }

    /// The formula with its matrix negated (same prefix with quantifiers dualised).
    pub fn negation(&self) -> Formula {
        let prefix = self
            .prefix
            .iter()
            .map(|(q, v)| {
                let q = match q {
                    Quantifier::Forall => Quantifier::Exists,
                    Quantifier::Exists => Quantifier::Forall,
                };
                (q, v.clone())
            })
            .collect();
        Formula {
            prefix,
            matrix: Matrix::not(self.matrix.clone()),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        while i < self.prefix.len() {
            let q = self.prefix[i].0;
            let mut j = i;
            while j < self.prefix.len() && self.prefix[j].0 == q {
                j += 1;
            }
            let vars: Vec<&str> = self.prefix[i..j].iter().map(|(_, v)| v.as_str()).collect();
            write!(f, "{} {}: ", q.keyword(), vars.join(", "))?;
            i = j;
        }
        write!(f, "{}", self.matrix)
    }
}

/// An ordered, duplicate-free set of closed formulas.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Theory {
    formulas: Vec<Formula>,
}

impl Theory {
    /// Builds a theory keeping first occurrences; checks arities agree across formulas.
    pub fn new(formulas: Vec<Formula>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut kept = Vec::with_capacity(formulas.len());
        let mut vocab = Vocabulary::new();
        for f in formulas {
            vocab.merge(&f.vocabulary()?)?;
            if seen.insert(f.clone()) {
                kept.push(f);
            }
        }
        Ok(Theory { formulas: kept })
    }

    pub fn empty() -> Self {
        Theory::default()
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn vocabulary(&self) -> Vocabulary {
        let mut vocab = Vocabulary::new();
        for f in &self.formulas {
            // Arities were checked in `new`.
            vocab
                .merge(&f.vocabulary().expect("checked"))
                .expect("checked");
        }
        vocab
    }

    pub fn constants(&self) -> BTreeSet<String> {
        self.formulas.iter().flat_map(|f| f.constants()).collect()
    }

    pub fn is_constant_free(&self) -> bool {
        self.formulas.iter().all(Formula::is_constant_free)
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for formula in &self.formulas {
            writeln!(f, "{formula}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Term {
        Term::Var(s.into())
    }

    #[test]
    fn unbound_and_duplicate_variables_rejected() {
        let m = Matrix::atom("p", vec![v("X")]);
        assert_eq!(
            Formula::new(vec![], m.clone()),
            Err(Error::UnboundVariable("X".into()))
        );
        assert_eq!(
            Formula::new(
                vec![(Quantifier::Forall, "X".into()), (Quantifier::Exists, "X".into())],
                m
            ),
            Err(Error::DuplicateBinding("X".into()))
        );
    }

    #[test]
    fn theory_rejects_conflicting_arities() {
        let f1 = Formula::new(
            vec![(Quantifier::Forall, "X".into())],
            Matrix::atom("p", vec![v("X")]),
        )
        .unwrap();
        let f2 = Formula::new(
            vec![(Quantifier::Forall, "X".into())],
            Matrix::atom("p", vec![v("X"), v("X")]),
        )
        .unwrap();
        assert!(matches!(
            Theory::new(vec![f1, f2]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn duplicates_removed_in_order() {
        let f = |p: &str| {
            Formula::new(
                vec![(Quantifier::Forall, "X".into())],
                Matrix::atom(p, vec![v("X")]),
            )
            .unwrap()
        };
        let t = Theory::new(vec![f("b"), f("a"), f("b")]).unwrap();
        assert_eq!(t.formulas(), &[f("b"), f("a")]);
    }

    #[test]
    fn identifiers() {
        assert!(is_constant_name("alice"));
        assert!(is_variable_name("X1"));
        assert!(!is_identifier("_x"));
        assert!(!is_identifier("1a"));
    }
}
