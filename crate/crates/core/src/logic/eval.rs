//! Closed-world model checking over finite domains.

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::example::{ConstId, Example, PredId};
use crate::logic::syntax::{Formula, Matrix, Quantifier, Term, Theory};

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Const(ConstId),
}

#[derive(Debug, Clone)]
enum Node {
    /// `None` when the predicate is absent from the example: always false.
    Atom(Option<PredId>, SmallVec<[Slot; 4]>),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
}

/// A formula resolved against one example's symbol tables.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    prefix: Vec<Quantifier>,
    matrix: Node,
}

impl CompiledFormula {
    pub fn new(example: &Example, formula: &Formula) -> Result<Self> {
        let vars: Vec<&str> = formula.prefix().iter().map(|(_, v)| v.as_str()).collect();
        let matrix = compile(example, &vars, formula.matrix())?;
        Ok(CompiledFormula {
            prefix: formula.prefix().iter().map(|(q, _)| *q).collect(),
            matrix,
        })
    }

    /// Truth with quantifiers ranging over `domain` and atoms looked up in the example.
    ///
    /// With `domain` a subset of the example's constants this is exactly truth in the
    /// fragment restricted to `domain`, provided the formula is constant-free.
    pub fn eval(&self, example: &Example, domain: &[ConstId]) -> bool {
        let mut assignment: SmallVec<[ConstId; 8]> = SmallVec::from_elem(0, self.prefix.len());
        self.eval_prefix(example, domain, 0, &mut assignment)
    }

    fn eval_prefix(
        &self,
        ex: &Example,
        domain: &[ConstId],
        depth: usize,
        asg: &mut SmallVec<[ConstId; 8]>,
    ) -> bool {
        if depth == self.prefix.len() {
            return eval_node(&self.matrix, ex, asg);
        }
        match self.prefix[depth] {
            Quantifier::Forall => domain.iter().all(|&c| {
                asg[depth] = c;
                self.eval_prefix(ex, domain, depth + 1, asg)
            }),
            Quantifier::Exists => domain.iter().any(|&c| {
                asg[depth] = c;
                self.eval_prefix(ex, domain, depth + 1, asg)
            }),
        }
    }
}

fn compile(ex: &Example, vars: &[&str], m: &Matrix) -> Result<Node> {
    Ok(match m {
        Matrix::Atom(a) => {
            let pred = match ex.predicate_id(&a.predicate) {
                Some(id) => {
                    let expected = ex.predicates()[id as usize].arity;
                    if expected != a.args.len() {
                        return Err(Error::ArityMismatch {
                            name: a.predicate.clone(),
                            expected,
                            found: a.args.len(),
                        });
                    }
                    Some(id)
                }
                None => None,
            };
            let args = a
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => vars
                        .iter()
                        .rposition(|x| x == v)
                        .map(Slot::Var)
                        .ok_or_else(|| Error::UnboundVariable(v.clone())),
                    Term::Const(c) => ex
                        .constant_id(c)
                        .map(Slot::Const)
                        .ok_or_else(|| Error::ConstantOutsideDomain(c.clone())),
                })
                .collect::<Result<_>>()?;
            Node::Atom(pred, args)
        }
        Matrix::Not(x) => Node::Not(Box::new(compile(ex, vars, x)?)),
        Matrix::And(xs) => Node::And(xs.iter().map(|x| compile(ex, vars, x)).collect::<Result<_>>()?),
        Matrix::Or(xs) => Node::Or(xs.iter().map(|x| compile(ex, vars, x)).collect::<Result<_>>()?),
        Matrix::Implies(a, b) => Node::Implies(
            Box::new(compile(ex, vars, a)?),
            Box::new(compile(ex, vars, b)?),
        ),
        Matrix::Iff(a, b) => Node::Iff(
            Box::new(compile(ex, vars, a)?),
            Box::new(compile(ex, vars, b)?),
        ),
    })
}

fn eval_node(n: &Node, ex: &Example, asg: &[ConstId]) -> bool {
    match n {
        Node::Atom(None, _) => false,
        Node::Atom(Some(p), slots) => {
            let args: SmallVec<[ConstId; 4]> = slots
                .iter()
                .map(|s| match *s {
                    Slot::Var(i) => asg[i],
                    Slot::Const(c) => c,
                })
                .collect();
            ex.holds_ids(*p, &args)
        }
        Node::Not(x) => !eval_node(x, ex, asg),
        Node::And(xs) => xs.iter().all(|x| eval_node(x, ex, asg)),
        Node::Or(xs) => xs.iter().any(|x| eval_node(x, ex, asg)),
        Node::Implies(a, b) => !eval_node(a, ex, asg) || eval_node(b, ex, asg),
        Node::Iff(a, b) => eval_node(a, ex, asg) == eval_node(b, ex, asg),
    }
}

/// A conjunction of compiled formulas.
#[derive(Debug, Clone)]
pub struct CompiledTheory {
    formulas: Vec<CompiledFormula>,
}

impl CompiledTheory {
    pub fn new(example: &Example, theory: &Theory) -> Result<Self> {
        Ok(CompiledTheory {
            formulas: theory
                .formulas()
                .iter()
                .map(|f| CompiledFormula::new(example, f))
                .collect::<Result<_>>()?,
        })
    }

    pub fn eval(&self, example: &Example, domain: &[ConstId]) -> bool {
        self.formulas.iter().all(|f| f.eval(example, domain))
    }
}

/// Whether the example satisfies the closed formula (closed-world, quantifiers over its domain).
pub fn evaluate(example: &Example, formula: &Formula) -> Result<bool> {
    let compiled = CompiledFormula::new(example, formula)?;
    let domain: Vec<ConstId> = (0..example.domain_size() as ConstId).collect();
    Ok(compiled.eval(example, &domain))
}

/// Whether the example satisfies every formula of the theory.
pub fn evaluate_theory(example: &Example, theory: &Theory) -> Result<bool> {
    let compiled = CompiledTheory::new(example, theory)?;
    let domain: Vec<ConstId> = (0..example.domain_size() as ConstId).collect();
    Ok(compiled.eval(example, &domain))
}

/// Truth with quantifiers restricted to `domain` while atoms are looked up in the full example.
///
/// For constant-free formulas this equals truth on the fragment induced by `domain`.
pub fn evaluate_on<S: AsRef<str>>(example: &Example, domain: &[S], formula: &Formula) -> Result<bool> {
    let mut ids = example.ids_of(domain)?;
    ids.sort_unstable();
    ids.dedup();
    Ok(CompiledFormula::new(example, formula)?.eval(example, &ids))
}
