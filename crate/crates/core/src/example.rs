//! Complete (closed-world) examples: a finite domain plus the set of true ground atoms.
//!
//! Example file format:
//!
//! ```text
//! # comment
//! domain: alice bob eve
//! predicates: fr/2 sm/1        # optional; declares predicates without atoms
//! fr(alice,bob).
//! sm(alice).
//! ```

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::logic::parser::{strip_comment, Cursor, Tok};
use crate::logic::syntax::{is_constant_name, GroundAtom, Predicate, Vocabulary};

pub type ConstId = u32;
pub type PredId = u32;
pub(crate) type Args = SmallVec<[ConstId; 4]>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Fact {
    pub pred: PredId,
    pub args: Args,
}

/// A finite relational structure under the closed-world assumption.
///
/// Constants are kept sorted; a constant's id is its position in that order,
/// so id order is lexicographic order.
#[derive(Debug, Clone)]
pub struct Example {
    constants: Vec<String>,
    predicates: Vec<Predicate>,
    facts: HashSet<Fact>,
}

impl PartialEq for Example {
    fn eq(&self, other: &Self) -> bool {
        self.constants == other.constants
            && self.predicates == other.predicates
            && self.facts == other.facts
    }
}

impl Eq for Example {}

impl Example {
    /// Builds an example; every atom must use declared constants and consistent arities.
    ///
    /// The vocabulary is `predicates` plus every predicate occurring in `atoms`.
    pub fn new<I, S>(constants: I, predicates: &[Predicate], atoms: &[GroundAtom]) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut constants: Vec<String> = constants.into_iter().map(Into::into).collect();
        for c in &constants {
            if !is_constant_name(c) {
                return Err(Error::InvalidParameter(format!("`{c}` is not a constant name")));
            }
        }
        constants.sort();
        constants.dedup();
        let mut vocab = Vocabulary::new();
        for p in predicates {
            vocab.insert(&p.name, p.arity)?;
        }
        for a in atoms {
            vocab.insert(&a.predicate, a.arity())?;
        }
        let predicates = vocab.predicates();
        let mut ex = Example {
            constants,
            predicates,
            facts: HashSet::with_capacity(atoms.len()),
        };
        for a in atoms {
            let fact = ex.intern(a)?;
            ex.facts.insert(fact);
        }
        Ok(ex)
    }

    pub(crate) fn from_parts(
        constants: Vec<String>,
        predicates: Vec<Predicate>,
        facts: HashSet<Fact>,
    ) -> Self {
        debug_assert!(constants.windows(2).all(|w| w[0] < w[1]));
        Example {
            constants,
            predicates,
            facts,
        }
    }

    fn intern(&self, a: &GroundAtom) -> Result<Fact> {
        let pred = self
            .predicate_id(&a.predicate)
            .ok_or_else(|| Error::UnknownPredicate(a.predicate.clone()))?;
        let expected = self.predicates[pred as usize].arity;
        if expected != a.arity() {
            return Err(Error::ArityMismatch {
                name: a.predicate.clone(),
                expected,
                found: a.arity(),
            });
        }
        let args = a
            .args
            .iter()
            .map(|c| {
                self.constant_id(c)
                    .ok_or_else(|| Error::ConstantOutsideDomain(c.clone()))
            })
            .collect::<Result<Args>>()?;
        Ok(Fact { pred, args })
    }

    /// Sorted domain.
    pub fn domain(&self) -> &[String] {
        &self.constants
    }

    pub fn domain_size(&self) -> usize {
        self.constants.len()
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn vocabulary(&self) -> Vocabulary {
        let mut v = Vocabulary::new();
        for p in &self.predicates {
            v.insert(&p.name, p.arity).expect("unique names");
        }
        v
    }

    pub fn constant_id(&self, name: &str) -> Option<ConstId> {
        self.constants
            .binary_search_by(|c| c.as_str().cmp(name))
            .ok()
            .map(|i| i as ConstId)
    }

    pub fn constant(&self, id: ConstId) -> &str {
        &self.constants[id as usize]
    }

    pub fn predicate_id(&self, name: &str) -> Option<PredId> {
        self.predicates
            .binary_search_by(|p| p.name.as_str().cmp(name))
            .ok()
            .map(|i| i as PredId)
    }

    pub fn atom_count(&self) -> usize {
        self.facts.len()
    }

    /// Closed-world lookup by ids.
    #[inline]
    pub(crate) fn holds_ids(&self, pred: PredId, args: &[ConstId]) -> bool {
        self.facts.contains(&Fact {
            pred,
            args: Args::from_slice(args),
        })
    }

    /// Closed-world truth of a ground atom; atoms over unknown symbols are false.
    pub fn holds(&self, atom: &GroundAtom) -> bool {
        match self.intern(atom) {
            Ok(f) => self.facts.contains(&f),
            Err(_) => false,
        }
    }

    /// Sorted list of true ground atoms.
    pub fn atoms(&self) -> Vec<GroundAtom> {
        let mut out: Vec<GroundAtom> = self.facts.iter().map(|f| self.fact_atom(f)).collect();
        out.sort();
        out
    }

    pub(crate) fn fact_atom(&self, f: &Fact) -> GroundAtom {
        GroundAtom::new(
            self.predicates[f.pred as usize].name.clone(),
            f.args.iter().map(|&c| self.constant(c).to_string()).collect(),
        )
    }

    /// Constants that occur in no atom.
    pub(crate) fn isolated_mask(&self) -> Vec<bool> {
        let mut isolated = vec![true; self.constants.len()];
        for f in &self.facts {
            for &c in &f.args {
                isolated[c as usize] = false;
            }
        }
        isolated
    }

    /// Ids of the given constant names.
    pub fn ids_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<ConstId>> {
        names
            .iter()
            .map(|n| {
                self.constant_id(n.as_ref())
                    .ok_or_else(|| Error::NotASubset(n.as_ref().to_string()))
            })
            .collect()
    }

    /// Builds the restriction to the given (sorted, unique) constant ids.
    pub(crate) fn restrict_ids(&self, ids: &[ConstId]) -> Example {
        let mut remap = vec![u32::MAX; self.constants.len()];
        for (new, &old) in ids.iter().enumerate() {
            remap[old as usize] = new as u32;
        }
        let constants: Vec<String> = ids.iter().map(|&i| self.constants[i as usize].clone()).collect();
        let facts = self
            .facts
            .iter()
            .filter(|f| f.args.iter().all(|&c| remap[c as usize] != u32::MAX))
            .map(|f| Fact {
                pred: f.pred,
                args: f.args.iter().map(|&c| remap[c as usize]).collect(),
            })
            .collect();
        Example::from_parts(constants, self.predicates.clone(), facts)
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "domain:")?;
        for c in &self.constants {
            write!(f, " {c}")?;
        }
        writeln!(f)?;
        let used: BTreeSet<PredId> = self.facts.iter().map(|f| f.pred).collect();
        if used.len() < self.predicates.len() {
            write!(f, "predicates:")?;
            for p in &self.predicates {
                write!(f, " {p}")?;
            }
            writeln!(f)?;
        }
        for a in self.atoms() {
            writeln!(f, "{a}.")?;
        }
        Ok(())
    }
}

/// Header lines shared by example and masked-example files.
pub(crate) struct Header {
    pub domain: Option<Vec<String>>,
    pub predicates: Vec<Predicate>,
}

/// Tries to consume a `domain:` or `predicates:` line. Returns false for other lines.
pub(crate) fn parse_header_line(
    body: &str,
    line: usize,
    header: &mut Header,
    seen_body: bool,
) -> Result<bool> {
    let trimmed = body.trim_start();
    if let Some(rest) = trimmed.strip_prefix("domain:") {
        if header.domain.is_some() {
            return Err(Error::DuplicateDomain(line));
        }
        if seen_body {
            return Err(Error::Syntax {
                line,
                column: 1,
                message: "`domain:` must precede all atoms".into(),
            });
        }
        let mut consts = Vec::new();
        for c in rest.split_whitespace() {
            if !is_constant_name(c) {
                return Err(Error::Syntax {
                    line,
                    column: body.find(c).map_or(1, |i| i + 1),
                    message: format!("`{c}` is not a constant (constants start with a lowercase letter)"),
                });
            }
            consts.push(c.to_string());
        }
        header.domain = Some(consts);
        return Ok(true);
    }
    if let Some(rest) = trimmed.strip_prefix("predicates:") {
        for p in rest.split_whitespace() {
            let pred = Predicate::parse(p).map_err(|_| Error::Syntax {
                line,
                column: body.find(p).map_or(1, |i| i + 1),
                message: format!("expected name/arity, found `{p}`"),
            })?;
            header.predicates.push(pred);
        }
        return Ok(true);
    }
    Ok(false)
}

/// Parses the example file format.
pub fn parse_example(text: &str) -> Result<Example> {
    let mut header = Header {
        domain: None,
        predicates: Vec::new(),
    };
    let mut atoms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw);
        if body.trim().is_empty() {
            continue;
        }
        if parse_header_line(body, line, &mut header, !atoms.is_empty())? {
            continue;
        }
        if header.domain.is_none() {
            return Err(Error::MissingDomain);
        }
        let mut c = Cursor::new(body, line)?;
        if c.peek() == Some(&Tok::Not) {
            return Err(c.error("negative literals are not allowed in a complete example"));
        }
        let lit = c.ground_literal()?;
        c.expect(&Tok::Dot)?;
        c.expect_end()?;
        atoms.push(lit.atom);
    }
    let domain = header.domain.ok_or(Error::MissingDomain)?;
    Example::new(domain, &header.predicates, &atoms)
}
