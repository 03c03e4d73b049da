//! Ground consistency and entailment over small universes, k-entailment and
//! voting entailment.
//!
//! A query over a universe `C'` grounds the theory with quantifiers ranging
//! over `C'`, adds the masked literals that mention only constants of `C'` as
//! unit clauses, and decides the result with the DPLL core. Atoms outside the
//! listed evidence are unknown (open world).
//!
//! Theories are constant-free, so the outcome depends only on `|C'|` and on the
//! evidence with constants renamed to their positions in `C'`. The engine
//! caches grounded CNFs per universe size and query outcomes per such pattern,
//! which makes the sweeps over all subsets of size at most `k` cheap.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::example::{ConstId, Example};
use crate::logic::{Formula, GroundAtom, GroundLiteral, Matrix, Predicate, Quantifier, Term, Theory};
use crate::masking::MaskedExample;
use crate::sampling::for_each_combination;
use crate::sat::{Cnf, Lit, Prop};

/// The unweighted voting parameter, kept exact.
pub type Gamma = Ratio<u64>;

/// Parses `γ` from a decimal (`0.05`) or a fraction (`2/3`) in `[0, 1]`.
pub fn parse_gamma(s: &str) -> Result<Gamma> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("gamma `{s}` is not a number in [0,1]"));
    let g = if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ratio::new(n, d)
    } else {
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 18 || (int.is_empty() && frac.is_empty()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let n: u64 = digits.parse().map_err(|_| bad())?;
        Ratio::new(n, 10u64.pow(frac.len() as u32))
    };
    if g > Ratio::from_integer(1) {
        return Err(bad());
    }
    Ok(g)
}

/// A theory grounded over a universe together with the evidence restricted to it.
#[derive(Debug, Clone)]
pub struct GroundProblem {
    /// The universe, sorted.
    pub universe: Vec<String>,
    /// Ground atoms for the CNF variables `1..=atoms.len()`; higher variables are auxiliary.
    pub atoms: Vec<GroundAtom>,
    pub cnf: Cnf,
}

impl GroundProblem {
    /// Grounds `theory` over `universe` and adds the masked literals inside it as unit clauses.
    pub fn new<S: AsRef<str>>(masked: &MaskedExample, theory: &Theory, universe: &[S]) -> Result<Self> {
        let engine = Engine::new(masked, theory, None, false)?;
        let ids = engine.universe_ids(universe)?;
        let m = ids.len();
        let mut cnf = engine.ground(m);
        for l in engine.assumptions(&ids) {
            cnf.add_clause(vec![l]);
        }
        let atoms = (1..=engine.atom_count(m) as u32)
            .map(|v| engine.decode(&ids, v as Lit).atom)
            .collect();
        Ok(GroundProblem {
            universe: ids.iter().map(|&c| engine.domain[c as usize].clone()).collect(),
            atoms,
            cnf,
        })
    }

    pub fn is_satisfiable(&self) -> bool {
        self.cnf.is_satisfiable(&[])
    }
}

/// Formula matrix with variables resolved to prefix positions and predicates to engine indices.
#[derive(Debug, Clone)]
enum Node {
    Atom(usize, Vec<usize>),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
}

struct Compiled {
    prefix: Vec<Quantifier>,
    matrix: Node,
}

type MaskEntry = (usize, Vec<ConstId>, bool);

/// Cached entailment machinery for one (masked example, theory, target) triple.
struct Engine {
    domain: Vec<String>,
    preds: Vec<Predicate>,
    target: Option<usize>,
    positive_only: bool,
    formulas: Vec<Compiled>,
    /// Evidence grouped by its sorted set of distinct constants.
    mask: HashMap<Vec<ConstId>, Vec<MaskEntry>>,
    groundings: HashMap<usize, Rc<Cnf>>,
    patterns: HashMap<(usize, Vec<Lit>), Option<Rc<Vec<Lit>>>>,
    /// Entailed target literals per universe, in global constant ids.
    by_universe: HashMap<Vec<ConstId>, Option<Rc<Vec<TargetLiteral>>>>,
}

/// A target literal: argument ids and sign.
type TargetLiteral = (Vec<ConstId>, bool);

impl Engine {
    fn new(
        masked: &MaskedExample,
        theory: &Theory,
        target: Option<&Predicate>,
        positive_only: bool,
    ) -> Result<Self> {
        if let Some(c) = theory.constants().into_iter().next() {
            return Err(Error::TheoryHasConstants(c));
        }
        let mut vocab = theory.vocabulary();
        if let Some(t) = target {
            vocab.insert(&t.name, t.arity)?;
        }
        let preds = vocab.predicates();
        let index = |name: &str| preds.iter().position(|p| p.name == name);
        for p in masked.predicates() {
            if let Some(i) = index(&p.name) {
                if preds[i].arity != p.arity {
                    return Err(Error::ArityMismatch {
                        name: p.name.clone(),
                        expected: preds[i].arity,
                        found: p.arity,
                    });
                }
            }
        }
        let domain = masked.domain().to_vec();
        let mut mask: HashMap<Vec<ConstId>, Vec<MaskEntry>> = HashMap::new();
        for (atom, &sign) in masked.raw_literals() {
            // Evidence on predicates outside the theory and target cannot affect any answer.
            let Some(p) = index(&atom.predicate) else {
                continue;
            };
            let args: Vec<ConstId> = atom
                .args
                .iter()
                .map(|c| domain.binary_search(c).unwrap() as ConstId)
                .collect();
            let mut key = args.clone();
            key.sort_unstable();
            key.dedup();
            mask.entry(key).or_default().push((p, args, sign));
        }
        let formulas = theory
            .formulas()
            .iter()
            .map(|f| compile(f, &preds))
            .collect();
        let target = target.map(|t| index(&t.name).unwrap());
        Ok(Engine {
            domain,
            preds,
            target,
            positive_only,
            formulas,
            mask,
            groundings: HashMap::new(),
            patterns: HashMap::new(),
            by_universe: HashMap::new(),
        })
    }

    fn universe_ids<S: AsRef<str>>(&self, universe: &[S]) -> Result<Vec<ConstId>> {
        let mut ids = universe
            .iter()
            .map(|s| {
                let s = s.as_ref();
                self.domain
                    .binary_search_by(|c| c.as_str().cmp(s))
                    .map(|i| i as ConstId)
                    .map_err(|_| Error::NotASubset(s.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        ids.sort_unstable();
        ids.dedup();
        Ok(ids)
    }

    fn offset(&self, m: usize, pred: usize) -> usize {
        self.preds[..pred].iter().map(|p| m.pow(p.arity as u32)).sum()
    }

    fn atom_count(&self, m: usize) -> usize {
        self.offset(m, self.preds.len())
    }

    fn var(&self, m: usize, pred: usize, positions: impl Iterator<Item = usize>) -> Lit {
        let idx = positions.fold(0, |acc, p| acc * m + p);
        (self.offset(m, pred) + idx + 1) as Lit
    }

    /// The ground literal for CNF literal `l` over `universe`.
    fn decode(&self, universe: &[ConstId], l: Lit) -> GroundLiteral {
        let (pred, args) = self.decode_ids(universe, l);
        GroundLiteral::new(
            GroundAtom::new(
                self.preds[pred].name.clone(),
                args.iter().map(|&c| self.domain[c as usize].clone()).collect(),
            ),
            l > 0,
        )
    }

    fn decode_ids(&self, universe: &[ConstId], l: Lit) -> (usize, Vec<ConstId>) {
        let m = universe.len();
        let mut idx = l.unsigned_abs() as usize - 1;
        let mut pred = 0;
        loop {
            let width = m.pow(self.preds[pred].arity as u32);
            if idx < width {
                break;
            }
            idx -= width;
            pred += 1;
        }
        let arity = self.preds[pred].arity;
        let mut args = vec![0; arity];
        for slot in (0..arity).rev() {
            args[slot] = universe[idx % m];
            idx /= m;
        }
        (pred, args)
    }

    /// The grounded theory over positions `0..m`; variables `1..=atom_count(m)` are atoms.
    fn ground(&self, m: usize) -> Cnf {
        let mut cnf = Cnf::with_vars(self.atom_count(m) as u32);
        for f in &self.formulas {
            let mut asg = vec![0; f.prefix.len()];
            let p = self.ground_prefix(f, m, 0, &mut asg);
            cnf.assert(&p);
        }
        cnf
    }

    fn ground_prefix(&self, f: &Compiled, m: usize, depth: usize, asg: &mut Vec<usize>) -> Prop {
        if depth == f.prefix.len() {
            return self.ground_node(&f.matrix, m, asg);
        }
        let parts = (0..m)
            .map(|c| {
                asg[depth] = c;
                self.ground_prefix(f, m, depth + 1, asg)
            })
            .collect();
        match f.prefix[depth] {
            Quantifier::Forall => Prop::and(parts),
            Quantifier::Exists => Prop::or(parts),
        }
    }

    fn ground_node(&self, n: &Node, m: usize, asg: &[usize]) -> Prop {
        match n {
            Node::Atom(p, slots) => {
                Prop::Var(self.var(m, *p, slots.iter().map(|&s| asg[s])) as u32)
            }
            Node::Not(x) => Prop::not(self.ground_node(x, m, asg)),
            Node::And(xs) => Prop::and(xs.iter().map(|x| self.ground_node(x, m, asg)).collect()),
            Node::Or(xs) => Prop::or(xs.iter().map(|x| self.ground_node(x, m, asg)).collect()),
            Node::Implies(a, b) => {
                Prop::implies(self.ground_node(a, m, asg), self.ground_node(b, m, asg))
            }
            Node::Iff(a, b) => Prop::iff(self.ground_node(a, m, asg), self.ground_node(b, m, asg)),
        }
    }

    fn grounding(&mut self, m: usize) -> Rc<Cnf> {
        if let Some(cnf) = self.groundings.get(&m) {
            return cnf.clone();
        }
        let cnf = Rc::new(self.ground(m));
        self.groundings.insert(m, cnf.clone());
        cnf
    }

    /// Evidence inside `universe` as sorted CNF unit literals.
    fn assumptions(&self, universe: &[ConstId]) -> Vec<Lit> {
        let m = universe.len();
        let mut out = Vec::new();
        let mut push = |entries: &Vec<MaskEntry>| {
            for (p, args, sign) in entries {
                let pos = args.iter().map(|c| universe.binary_search(c).unwrap());
                let v = self.var(m, *p, pos);
                out.push(if *sign { v } else { -v });
            }
        };
        if m < 20 && (1usize << m) <= self.mask.len() {
            for bits in 0..1usize << m {
                let key: Vec<ConstId> = (0..m).filter(|i| bits >> i & 1 == 1).map(|i| universe[i]).collect();
                if let Some(entries) = self.mask.get(&key) {
                    push(entries);
                }
            }
        } else {
            for (key, entries) in &self.mask {
                if key.iter().all(|c| universe.binary_search(c).is_ok()) {
                    push(entries);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// `None` when evidence and theory are inconsistent over `universe`; otherwise
    /// the entailed target literals as CNF literals over positions.
    fn analyse(&mut self, universe: &[ConstId]) -> Option<Rc<Vec<Lit>>> {
        let m = universe.len();
        let key = (m, self.assumptions(universe));
        if let Some(hit) = self.patterns.get(&key) {
            return hit.clone();
        }
        let cnf = self.grounding(m);
        let result = self.solve_pattern(&cnf, m, &key.1);
        self.patterns.insert(key, result.clone());
        result
    }

    fn solve_pattern(&self, cnf: &Cnf, m: usize, assumptions: &[Lit]) -> Option<Rc<Vec<Lit>>> {
        let model = cnf.solve(assumptions)?;
        let Some(t) = self.target else {
            return Some(Rc::new(Vec::new()));
        };
        let first = self.offset(m, t) + 1;
        let width = m.pow(self.preds[t].arity as u32);
        // A literal is entailed only if it holds in every model; each model found
        // eliminates the candidates it falsifies.
        let mut candidates: Vec<Lit> = (first..first + width)
            .map(|v| if model[v] { v as Lit } else { -(v as Lit) })
            .filter(|&l| !self.positive_only || l > 0)
            .collect();
        let mut entailed = Vec::new();
        let mut query = assumptions.to_vec();
        while let Some(l) = candidates.pop() {
            query.push(-l);
            match cnf.solve(&query) {
                None => entailed.push(l),
                Some(other) => {
                    candidates.retain(|&c| other[c.unsigned_abs() as usize] == (c > 0));
                }
            }
            query.pop();
        }
        entailed.sort_unstable_by_key(|l| l.unsigned_abs());
        Some(Rc::new(entailed))
    }

    /// Entailed target literals over `universe` in global ids; memoised per universe.
    fn entailed(&mut self, universe: &[ConstId]) -> Option<Rc<Vec<TargetLiteral>>> {
        if let Some(hit) = self.by_universe.get(universe) {
            return hit.clone();
        }
        let result = self.analyse(universe).map(|lits| {
            Rc::new(
                lits.iter()
                    .map(|&l| (self.decode_ids(universe, l).1, l > 0))
                    .collect::<Vec<_>>(),
            )
        });
        self.by_universe.insert(universe.to_vec(), result.clone());
        result
    }

    fn is_entailed(&mut self, universe: &[ConstId], lit: &TargetLiteral) -> bool {
        match self.entailed(universe) {
            Some(lits) => lits.contains(lit),
            None => false,
        }
    }

    fn literal(&self, (args, sign): &TargetLiteral) -> GroundLiteral {
        let p = &self.preds[self.target.unwrap()];
        GroundLiteral::new(
            GroundAtom::new(
                p.name.clone(),
                args.iter().map(|&c| self.domain[c as usize].clone()).collect(),
            ),
            *sign,
        )
    }

    fn names(&self, ids: &[ConstId]) -> Vec<String> {
        ids.iter().map(|&c| self.domain[c as usize].clone()).collect()
    }

    fn target_literal(&self, l: &GroundLiteral) -> Result<TargetLiteral> {
        let ids = l
            .atom
            .args
            .iter()
            .map(|c| {
                self.domain
                    .binary_search(c)
                    .map(|i| i as ConstId)
                    .map_err(|_| Error::ConstantOutsideDomain(c.clone()))
            })
            .collect::<Result<_>>()?;
        Ok((ids, l.positive))
    }
}

fn compile(f: &Formula, preds: &[Predicate]) -> Compiled {
    let vars: Vec<&str> = f.prefix().iter().map(|(_, v)| v.as_str()).collect();
    Compiled {
        prefix: f.prefix().iter().map(|(q, _)| *q).collect(),
        matrix: compile_matrix(f.matrix(), &vars, preds),
    }
}

fn compile_matrix(m: &Matrix, vars: &[&str], preds: &[Predicate]) -> Node {
    let rec = |x: &Matrix| compile_matrix(x, vars, preds);
    match m {
        Matrix::Atom(a) => Node::Atom(
            preds.iter().position(|p| p.name == a.predicate).unwrap(),
            a.args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => vars.iter().rposition(|x| x == v).unwrap(),
                    Term::Const(_) => unreachable!("theory is constant-free"),
                })
                .collect(),
        ),
        Matrix::Not(x) => Node::Not(Box::new(rec(x))),
        Matrix::And(xs) => Node::And(xs.iter().map(rec).collect()),
        Matrix::Or(xs) => Node::Or(xs.iter().map(rec).collect()),
        Matrix::Implies(a, b) => Node::Implies(Box::new(rec(a)), Box::new(rec(b))),
        Matrix::Iff(a, b) => Node::Iff(Box::new(rec(a)), Box::new(rec(b))),
    }
}

fn literal_constants(l: &GroundLiteral) -> Vec<String> {
    l.atom.constants().into_iter().map(str::to_string).collect()
}

/// Whether the evidence inside `universe` is consistent with the theory grounded over `universe`.
pub fn consistent<S: AsRef<str>>(masked: &MaskedExample, theory: &Theory, universe: &[S]) -> Result<bool> {
    let mut engine = Engine::new(masked, theory, None, false)?;
    let ids = engine.universe_ids(universe)?;
    Ok(engine.analyse(&ids).is_some())
}

/// Whether the evidence inside `universe` and the grounded theory entail `phi`.
///
/// There is no consistency guard here: an inconsistent problem entails everything.
pub fn entails<S: AsRef<str>>(
    masked: &MaskedExample,
    theory: &Theory,
    universe: &[S],
    phi: &GroundLiteral,
) -> Result<bool> {
    let target = Predicate::new(phi.atom.predicate.clone(), phi.atom.arity());
    let mut engine = Engine::new(masked, theory, Some(&target), false)?;
    let ids = engine.universe_ids(universe)?;
    let lit = engine.target_literal(phi)?;
    if let Some(c) = lit.0.iter().find(|c| ids.binary_search(c).is_err()) {
        return Err(Error::NotASubset(engine.domain[*c as usize].clone()));
    }
    Ok(match engine.entailed(&ids) {
        Some(lits) => lits.contains(&lit),
        None => true,
    })
}

/// Searches for a witness `C'` with `const(phi) ⊆ C'`, `|C'| ≤ k`, such that the
/// evidence inside `C'` is consistent with the theory and entails `phi`.
///
/// Candidates are tried by increasing size and lexicographically within a size,
/// so the returned witness is the first in that order.
pub fn k_entails(
    masked: &MaskedExample,
    theory: &Theory,
    k: usize,
    phi: &GroundLiteral,
) -> Result<Option<Vec<String>>> {
    let constants = literal_constants(phi);
    if constants.len() > k {
        return Err(Error::LiteralTooWide {
            constants: constants.len(),
            k,
        });
    }
    let target = Predicate::new(phi.atom.predicate.clone(), phi.atom.arity());
    let mut engine = Engine::new(masked, theory, Some(&target), false)?;
    let lit = engine.target_literal(phi)?;
    let required = engine.universe_ids(&constants)?;
    let others: Vec<ConstId> = (0..engine.domain.len() as ConstId)
        .filter(|c| required.binary_search(c).is_err())
        .collect();
    for extra in 0..=(k - required.len()).min(others.len()) {
        let mut found = None;
        for_each_combination(others.len(), extra, |combo| {
            if found.is_some() {
                return;
            }
            let mut u: Vec<ConstId> = required.clone();
            u.extend(combo.iter().map(|&i| others[i]));
            u.sort_unstable();
            if engine.is_entailed(&u, &lit) {
                found = Some(u);
            }
        });
        if let Some(u) = found {
            return Ok(Some(engine.names(&u)));
        }
    }
    Ok(None)
}

/// How literals were derived.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mode {
    KEntailment { k: usize },
    Voting {
        k: usize,
        gamma: String,
        /// `max(1, γ·|C|^(k−a))` as an exact fraction.
        threshold: String,
    },
}

/// A derived literal with its first witness and, under voting, its vote count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derived {
    pub literal: GroundLiteral,
    pub witness: Vec<String>,
    pub votes: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntailmentResult {
    pub target: Predicate,
    pub mode: Mode,
    /// Sorted by literal.
    pub literals: Vec<Derived>,
}

impl EntailmentResult {
    pub fn contains(&self, l: &GroundLiteral) -> bool {
        self.literals.iter().any(|d| d.literal == *l)
    }

    pub fn literal_set(&self) -> Vec<GroundLiteral> {
        self.literals.iter().map(|d| d.literal.clone()).collect()
    }
}

impl fmt::Display for EntailmentResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.literals {
            write!(f, "{} [{}]", d.literal, d.witness.join(" "))?;
            if let Some(v) = d.votes {
                write!(f, " votes={v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Every k-entailed literal of `target` with its first witness per [`k_entails`] order.
fn sweep(engine: &mut Engine, k: usize) -> BTreeMap<TargetLiteral, Vec<ConstId>> {
    let n = engine.domain.len();
    let mut found: BTreeMap<TargetLiteral, Vec<ConstId>> = BTreeMap::new();
    for size in 0..=k.min(n) {
        for_each_combination(n, size, |combo| {
            let u: Vec<ConstId> = combo.iter().map(|&c| c as ConstId).collect();
            if let Some(lits) = engine.entailed(&u) {
                for l in lits.iter() {
                    found.entry(l.clone()).or_insert_with(|| u.clone());
                }
            }
        });
    }
    found
}

fn check_arity(target: &Predicate, k: usize) -> Result<()> {
    if target.arity > k {
        return Err(Error::ArityExceedsK {
            arity: target.arity,
            k,
        });
    }
    Ok(())
}

/// All k-entailed ground literals of `target`.
///
/// Negative literals are included unless `positive_only` is set.
pub fn k_entailed_literals(
    masked: &MaskedExample,
    theory: &Theory,
    k: usize,
    target: &Predicate,
    positive_only: bool,
) -> Result<EntailmentResult> {
    check_arity(target, k)?;
    let mut engine = Engine::new(masked, theory, Some(target), positive_only)?;
    let found = sweep(&mut engine, k);
    let mut literals: Vec<Derived> = found
        .iter()
        .map(|(l, w)| Derived {
            literal: engine.literal(l),
            witness: engine.names(w),
            votes: None,
        })
        .collect();
    literals.sort_by(|a, b| a.literal.cmp(&b.literal));
    Ok(EntailmentResult {
        target: target.clone(),
        mode: Mode::KEntailment { k },
        literals,
    })
}

/// Number of size-k subsets `S ⊇ const(l)` such that `l` is k-entailed from the
/// evidence restricted to `S` and the theory, with `S` as the pool of witnesses.
pub fn vote_count(masked: &MaskedExample, theory: &Theory, k: usize, l: &GroundLiteral) -> Result<u128> {
    let n = masked.domain().len();
    if k > n {
        return Err(Error::FragmentTooLarge { k, domain: n });
    }
    let constants = literal_constants(l);
    if constants.len() > k {
        return Err(Error::LiteralTooWide {
            constants: constants.len(),
            k,
        });
    }
    let target = Predicate::new(l.atom.predicate.clone(), l.atom.arity());
    let mut engine = Engine::new(masked, theory, Some(&target), false)?;
    let lit = engine.target_literal(l)?;
    let required = engine.universe_ids(&constants)?;
    let others: Vec<ConstId> = (0..n as ConstId)
        .filter(|c| required.binary_search(c).is_err())
        .collect();
    let mut votes = 0u128;
    for_each_combination(others.len(), k - required.len(), |combo| {
        // Witnesses inside S must still contain const(l).
        let hit = subsets_containing(&required, &combo.iter().map(|&i| others[i]).collect::<Vec<_>>())
            .into_iter()
            .any(|u| engine.is_entailed(&u, &lit));
        if hit {
            votes += 1;
        }
    });
    Ok(votes)
}

/// Sorted universes `required ∪ T` for every `T ⊆ extra`.
fn subsets_containing(required: &[ConstId], extra: &[ConstId]) -> Vec<Vec<ConstId>> {
    (0..1usize << extra.len())
        .map(|bits| {
            let mut u = required.to_vec();
            u.extend((0..extra.len()).filter(|i| bits >> i & 1 == 1).map(|i| extra[i]));
            u.sort_unstable();
            u
        })
        .collect()
}

/// `max(1, γ·n^(k−a))` as an exact fraction.
pub fn vote_threshold(gamma: Gamma, n: usize, k: usize, a: usize) -> Ratio<u128> {
    let scale = (n as u128).saturating_pow((k - a) as u32);
    let t = Ratio::new((*gamma.numer() as u128).saturating_mul(scale), *gamma.denom() as u128);
    t.max(Ratio::from_integer(1))
}

/// Literals of `target` with at least `max(1, γ·|C|^(k−a))` votes.
pub fn voting_entailed_literals(
    masked: &MaskedExample,
    theory: &Theory,
    k: usize,
    gamma: Gamma,
    target: &Predicate,
    positive_only: bool,
) -> Result<EntailmentResult> {
    Ok(k_and_voting_literals(masked, theory, k, gamma, target, positive_only)?.1)
}

/// k-entailed literals (with vote counts) and the voting-entailed subset, from one sweep.
pub fn k_and_voting_literals(
    masked: &MaskedExample,
    theory: &Theory,
    k: usize,
    gamma: Gamma,
    target: &Predicate,
    positive_only: bool,
) -> Result<(EntailmentResult, EntailmentResult)> {
    check_arity(target, k)?;
    let n = masked.domain().len();
    if k > n {
        return Err(Error::FragmentTooLarge { k, domain: n });
    }
    let mut engine = Engine::new(masked, theory, Some(target), positive_only)?;
    let witnesses = sweep(&mut engine, k);
    let mut votes: HashMap<TargetLiteral, u128> = HashMap::new();
    let mut seen: Vec<TargetLiteral> = Vec::new();
    for_each_combination(n, k, |combo| {
        let s: Vec<ConstId> = combo.iter().map(|&c| c as ConstId).collect();
        seen.clear();
        for u in subsets_containing(&[], &s) {
            if let Some(lits) = engine.entailed(&u) {
                seen.extend(lits.iter().cloned());
            }
        }
        seen.sort_unstable();
        seen.dedup();
        for l in &seen {
            *votes.entry(l.clone()).or_default() += 1;
        }
    });
    let threshold = vote_threshold(gamma, n, k, target.arity);
    let mut all: Vec<Derived> = witnesses
        .iter()
        .map(|(l, w)| Derived {
            literal: engine.literal(l),
            witness: engine.names(w),
            votes: Some(votes.get(l).copied().unwrap_or(0)),
        })
        .collect();
    all.sort_by(|a, b| a.literal.cmp(&b.literal));
    let accepted = all
        .iter()
        .filter(|d| Ratio::from_integer(d.votes.unwrap()) >= threshold)
        .cloned()
        .collect();
    Ok((
        EntailmentResult {
            target: target.clone(),
            mode: Mode::KEntailment { k },
            literals: all,
        },
        EntailmentResult {
            target: target.clone(),
            mode: Mode::Voting {
                k,
                gamma: gamma.to_string(),
                threshold: threshold.to_string(),
            },
            literals: accepted,
        },
    ))
}

/// The entailed literals of `target` that are false in the complete example `gamma_example`.
///
/// Uses voting with parameter `gamma` when given, k-entailment otherwise.
pub fn false_entailed(
    example: &Example,
    masked: &MaskedExample,
    theory: &Theory,
    k: usize,
    gamma: Option<Gamma>,
    target: &Predicate,
    positive_only: bool,
) -> Result<Vec<GroundLiteral>> {
    if example.domain() != masked.domain() {
        return Err(Error::DomainMismatch);
    }
    let result = match gamma {
        Some(g) => voting_entailed_literals(masked, theory, k, g, target, positive_only)?,
        None => k_entailed_literals(masked, theory, k, target, positive_only)?,
    };
    Ok(result
        .literals
        .into_iter()
        .map(|d| d.literal)
        .filter(|l| example.holds(&l.atom) != l.positive)
        .collect())
}
