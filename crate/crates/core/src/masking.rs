//! Masking processes: truthful partial views of complete examples.
//!
//! A masked example is a conjunction of signed ground literals that the source
//! example satisfies. Atoms not mentioned are unknown.
//!
//! Masked-example file format:
//!
//! ```text
//! domain: alice bob eve
//! predicates: fr/2 sm/1     # optional
//! fr(alice,bob)
//! !sm(bob)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::example::{parse_header_line, Example, Header};
use crate::logic::parser::{strip_comment, Cursor, Tok};
use crate::logic::{GroundAtom, GroundLiteral, Predicate, Vocabulary};
use crate::sampling::{for_each_tuple, rng_for};

/// A consistent conjunction of ground literals over a domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedExample {
    domain: Vec<String>,
    predicates: Vec<Predicate>,
    literals: BTreeMap<GroundAtom, bool>,
}

impl MaskedExample {
    /// Validates constants, arities and sign consistency.
    pub fn new<S: Into<String>>(
        domain: impl IntoIterator<Item = S>,
        predicates: &[Predicate],
        literals: impl IntoIterator<Item = GroundLiteral>,
    ) -> Result<Self> {
        let mut domain: Vec<String> = domain.into_iter().map(Into::into).collect();
        domain.sort();
        domain.dedup();
        let mut vocab = Vocabulary::new();
        for p in predicates {
            vocab.insert(&p.name, p.arity)?;
        }
        let mut map = BTreeMap::new();
        for l in literals {
            vocab.insert(&l.atom.predicate, l.atom.arity())?;
            for c in &l.atom.args {
                if domain.binary_search(c).is_err() {
                    return Err(Error::ConstantOutsideDomain(c.clone()));
                }
            }
            match map.get(&l.atom) {
                Some(&sign) if sign != l.positive => {
                    return Err(Error::ContradictoryLiteral(l.atom.to_string()))
                }
                _ => {
                    map.insert(l.atom, l.positive);
                }
            }
        }
        Ok(MaskedExample {
            domain,
            predicates: vocab.predicates(),
            literals: map,
        })
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Literals in sorted order.
    pub fn literals(&self) -> impl Iterator<Item = GroundLiteral> + '_ {
        self.literals
            .iter()
            .map(|(a, &s)| GroundLiteral::new(a.clone(), s))
    }

    pub fn contains(&self, literal: &GroundLiteral) -> bool {
        self.literals.get(&literal.atom) == Some(&literal.positive)
    }

    /// Known sign of an atom, if any.
    pub fn sign_of(&self, atom: &GroundAtom) -> Option<bool> {
        self.literals.get(atom).copied()
    }

    pub(crate) fn raw_literals(&self) -> &BTreeMap<GroundAtom, bool> {
        &self.literals
    }
}

impl fmt::Display for MaskedExample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "domain:")?;
        for c in &self.domain {
            write!(f, " {c}")?;
        }
        writeln!(f)?;
        let used: BTreeSet<&str> = self.literals.keys().map(|a| a.predicate.as_str()).collect();
        if used.len() < self.predicates.len() {
            write!(f, "predicates:")?;
            for p in &self.predicates {
                write!(f, " {p}")?;
            }
            writeln!(f)?;
        }
        for l in self.literals() {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses the masked-example file format.
pub fn parse_masked_example(text: &str) -> Result<MaskedExample> {
    let mut header = Header {
        domain: None,
        predicates: Vec::new(),
    };
    let mut literals = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        if body.trim().is_empty() {
            continue;
        }
        if parse_header_line(body, line, &mut header, !literals.is_empty())? {
            continue;
        }
        if header.domain.is_none() {
            return Err(Error::MissingDomain);
        }
        let mut c = Cursor::new(body, line)?;
        let lit = c.ground_literal()?;
        c.eat(&Tok::Dot);
        c.expect_end()?;
        literals.push(lit);
    }
    let domain = header.domain.ok_or(Error::MissingDomain)?;
    MaskedExample::new(domain, &header.predicates, literals)
}

/// A masking process.
#[derive(Debug, Clone, PartialEq)]
pub enum Masker {
    /// Every ground literal with its true sign.
    Identity,
    /// The true positive literals of the listed predicates.
    PositiveOnly(Vec<String>),
    /// Each true ground literal kept independently with probability `p`.
    RandomDrop { p: f64, seed: u64 },
    /// Exactly the given literals, which must be true.
    LiteralList(Vec<GroundLiteral>),
}

impl Masker {
    pub fn kind(&self) -> &'static str {
        match self {
            Masker::Identity => "identity",
            Masker::PositiveOnly(_) => "positive-only",
            Masker::RandomDrop { .. } => "random-drop",
            Masker::LiteralList(_) => "literal-list",
        }
    }

    fn validate(&self, example: &Example) -> Result<()> {
        match self {
            Masker::Identity => Ok(()),
            Masker::PositiveOnly(preds) => {
                for p in preds {
                    if example.predicate_id(p).is_none() {
                        return Err(Error::UnknownPredicate(p.clone()));
                    }
                }
                Ok(())
            }
            Masker::RandomDrop { p, .. } => {
                if (0.0..=1.0).contains(p) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("drop probability {p} not in [0,1]")))
                }
            }
            Masker::LiteralList(lits) => {
                for l in lits {
                    for c in &l.atom.args {
                        if example.constant_id(c).is_none() {
                            return Err(Error::ConstantOutsideDomain(c.clone()));
                        }
                    }
                    if example.holds(&l.atom) != l.positive {
                        return Err(Error::UntruthfulLiteral(l.to_string()));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Calls `f` on every ground atom over the example's vocabulary and domain,
/// predicates in name order and argument tuples in lexicographic order.
fn for_each_ground_atom(example: &Example, mut f: impl FnMut(GroundAtom)) {
    let n = example.domain_size();
    for p in example.predicates() {
        for_each_tuple(n, p.arity, |tuple| {
            f(GroundAtom::new(
                p.name.clone(),
                tuple.iter().map(|&c| example.constant(c as u32).to_string()).collect(),
            ))
        });
    }
}

/// Applies a masking process to a complete example.
pub fn apply_mask(masker: &Masker, example: &Example) -> Result<MaskedExample> {
    masker.validate(example)?;
    let mut literals = Vec::new();
    match masker {
        Masker::Identity => for_each_ground_atom(example, |a| {
            let sign = example.holds(&a);
            literals.push(GroundLiteral::new(a, sign));
        }),
        Masker::PositiveOnly(preds) => {
            let wanted: BTreeSet<&str> = preds.iter().map(String::as_str).collect();
            literals.extend(
                example
                    .atoms()
                    .into_iter()
                    .filter(|a| wanted.contains(a.predicate.as_str()))
                    .map(|a| GroundLiteral::new(a, true)),
            );
        }
        Masker::RandomDrop { p, seed } => {
            let mut rng = rng_for(*seed, 0);
            for_each_ground_atom(example, |a| {
                let keep = rng.gen::<f64>() < *p;
                if keep {
                    let sign = example.holds(&a);
                    literals.push(GroundLiteral::new(a, sign));
                }
            });
        }
        Masker::LiteralList(lits) => literals.extend(lits.iter().cloned()),
    }
    MaskedExample::new(
        example.domain().iter().cloned(),
        example.predicates(),
        literals,
    )
}

/// Keeps the literals that mention only constants of `subset`; the domain becomes `subset`.
pub fn mask_restrict<S: AsRef<str>>(masked: &MaskedExample, subset: &[S]) -> Result<MaskedExample> {
    let mut keep: Vec<String> = Vec::with_capacity(subset.len());
    for s in subset {
        let s = s.as_ref();
        if masked.domain.binary_search_by(|c| c.as_str().cmp(s)).is_err() {
            return Err(Error::NotASubset(s.to_string()));
        }
        keep.push(s.to_string());
    }
    keep.sort();
    keep.dedup();
    let literals = masked
        .literals
        .iter()
        .filter(|(a, _)| a.args.iter().all(|c| keep.binary_search(c).is_ok()))
        .map(|(a, &s)| (a.clone(), s))
        .collect();
    Ok(MaskedExample {
        domain: keep,
        predicates: masked.predicates.clone(),
        literals,
    })
}
