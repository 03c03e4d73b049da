//! Rewriting theories with constants into constant-free theories over
//! auxiliary predicates.
//!
//! An atom `p(t1..tm)` with constants at some positions becomes an atom of the
//! auxiliary predicate `p__<pos>_<const>...` (positions 1-based) over the
//! remaining variable arguments, so `fr(alice,X)` becomes `fr__1_alice(X)`.
//! The example gains every auxiliary fact whose expansion holds in it.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::example::Example;
use crate::logic::{Atom, Formula, GroundAtom, Predicate, Term, Theory};

/// How an auxiliary predicate expands back into an original atom.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Pattern {
    predicate: String,
    /// The constant at each fixed position, `None` for variable positions.
    fixed: Vec<Option<String>>,
}

fn aux_name(predicate: &str, fixed: &[Option<String>]) -> String {
    let mut name = predicate.to_string();
    for (i, c) in fixed.iter().enumerate() {
        if let Some(c) = c {
            name.push_str(&format!("__{}_{c}", i + 1));
        }
    }
    name
}

/// Returns the constant-free theory and the example augmented with auxiliary facts.
/// A constant-free theory is returned unchanged together with the unchanged example.
pub fn eliminate_constants(theory: &Theory, example: &Example) -> Result<(Theory, Example)> {
    for c in theory.constants() {
        if example.constant_id(&c).is_none() {
            return Err(Error::ConstantOutsideDomain(c));
        }
    }
    let mut patterns: BTreeMap<String, Pattern> = BTreeMap::new();
    let mut rewrite = |a: &Atom| {
        if a.args.iter().all(|t| matches!(t, Term::Var(_))) {
            return a.clone();
        }
        let fixed: Vec<Option<String>> = a
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                Term::Var(_) => None,
            })
            .collect();
        let name = aux_name(&a.predicate, &fixed);
        patterns.entry(name.clone()).or_insert(Pattern {
            predicate: a.predicate.clone(),
            fixed,
        });
        Atom {
            predicate: name,
            args: a.args.iter().filter(|t| matches!(t, Term::Var(_))).cloned().collect(),
        }
    };
    let formulas = theory
        .formulas()
        .iter()
        .map(|f| Formula::new(f.prefix().to_vec(), f.matrix().map_atoms(&mut rewrite)))
        .collect::<Result<Vec<_>>>()?;
    if patterns.is_empty() {
        return Ok((theory.clone(), example.clone()));
    }

    let taken: BTreeSet<String> = example
        .predicates()
        .iter()
        .map(|p| p.name.clone())
        .chain(theory.vocabulary().predicates().into_iter().map(|p| p.name))
        .collect();
    if let Some(name) = patterns.keys().find(|n| taken.contains(*n)) {
        return Err(Error::NameCollision(name.clone()));
    }

    let mut predicates = example.predicates().to_vec();
    let mut atoms = example.atoms();
    let originals = example.atoms();
    for (name, pattern) in &patterns {
        let arity = pattern.fixed.iter().filter(|c| c.is_none()).count();
        predicates.push(Predicate::new(name.clone(), arity));
        for atom in originals.iter().filter(|a| a.predicate == pattern.predicate) {
            let matches = atom
                .args
                .iter()
                .zip(&pattern.fixed)
                .all(|(arg, c)| c.as_ref().map_or(true, |c| c == arg));
            if matches && atom.args.len() == pattern.fixed.len() {
                let rest = atom
                    .args
                    .iter()
                    .zip(&pattern.fixed)
                    .filter(|(_, c)| c.is_none())
                    .map(|(a, _)| a.clone())
                    .collect();
                atoms.push(GroundAtom::new(name.clone(), rest));
            }
        }
    }
    let augmented = Example::new(example.domain().iter().cloned(), &predicates, &atoms)?;
    Ok((Theory::new(formulas)?, augmented))
}
