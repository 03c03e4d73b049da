//! Propositional layer: ground formulas, definitional CNF conversion, and a
//! DPLL satisfiability check with unit propagation.
//!
//! Instances come from grounding a theory over a handful of constants, so the
//! solver favours simplicity over clause learning or watched literals.

/// A literal: `+v` or `-v` for variable `v >= 1`.
pub type Lit = i32;

/// A ground propositional formula. Constructors fold constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop {
    Const(bool),
    Var(u32),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Iff(Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn not(p: Prop) -> Prop {
        match p {
            Prop::Const(b) => Prop::Const(!b),
            Prop::Not(x) => *x,
            p => Prop::Not(Box::new(p)),
        }
    }

    pub fn and(items: Vec<Prop>) -> Prop {
        let mut out = Vec::with_capacity(items.len());
        for p in items {
            match p {
                Prop::Const(true) => {}
                Prop::Const(false) => return Prop::Const(false),
                Prop::And(xs) => out.extend(xs),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Prop::Const(true),
            1 => out.pop().unwrap(),
            _ => Prop::And(out),
        }
    }

    pub fn or(items: Vec<Prop>) -> Prop {
        let mut out = Vec::with_capacity(items.len());
        for p in items {
            match p {
                Prop::Const(false) => {}
                Prop::Const(true) => return Prop::Const(true),
                Prop::Or(xs) => out.extend(xs),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Prop::Const(false),
            1 => out.pop().unwrap(),
            _ => Prop::Or(out),
        }
    }

    pub fn implies(a: Prop, b: Prop) -> Prop {
        Prop::or(vec![Prop::not(a), b])
    }

    pub fn iff(a: Prop, b: Prop) -> Prop {
        match (a, b) {
            (Prop::Const(x), p) | (p, Prop::Const(x)) => {
                if x {
                    p
                } else {
                    Prop::not(p)
                }
            }
            (a, b) => Prop::Iff(Box::new(a), Box::new(b)),
        }
    }

    fn as_literal(&self) -> Option<Lit> {
        match self {
            Prop::Var(v) => Some(*v as Lit),
            Prop::Not(x) => match **x {
                Prop::Var(v) => Some(-(v as Lit)),
                _ => None,
            },
            _ => None,
        }
    }

    /// Truth under a total assignment indexed by variable.
    pub fn eval(&self, model: &[bool]) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Var(v) => model[*v as usize],
            Prop::Not(x) => !x.eval(model),
            Prop::And(xs) => xs.iter().all(|x| x.eval(model)),
            Prop::Or(xs) => xs.iter().any(|x| x.eval(model)),
            Prop::Iff(a, b) => a.eval(model) == b.eval(model),
        }
    }
}

/// A CNF formula over variables `1..=num_vars`.
#[derive(Debug, Clone, Default)]
pub struct Cnf {
    num_vars: u32,
    clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    /// A CNF with variables `1..=num_vars` reserved.
    pub fn with_vars(num_vars: u32) -> Self {
        Cnf {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn new_var(&mut self) -> u32 {
        self.num_vars += 1;
        self.num_vars
    }

    pub fn add_clause(&mut self, clause: Vec<Lit>) {
        debug_assert!(clause.iter().all(|l| l.unsigned_abs() <= self.num_vars && *l != 0));
        self.clauses.push(clause);
    }

    /// Adds clauses equisatisfiable with `p` (definitional encoding; fresh
    /// variables are allocated above the current `num_vars`).
    pub fn assert(&mut self, p: &Prop) {
        match p {
            Prop::Const(true) => {}
            Prop::Const(false) => self.clauses.push(Vec::new()),
            Prop::And(xs) => xs.iter().for_each(|x| self.assert(x)),
            Prop::Or(xs) => {
                let clause = xs.iter().map(|x| self.define(x)).collect();
                self.clauses.push(clause);
            }
            p => {
                let l = self.define(p);
                self.clauses.push(vec![l]);
            }
        }
    }

    /// A literal equivalent to `p`, introducing definitions as needed.
    fn define(&mut self, p: &Prop) -> Lit {
        if let Some(l) = p.as_literal() {
            return l;
        }
        match p {
            Prop::Const(b) => {
                let v = self.new_var() as Lit;
                self.clauses.push(vec![if *b { v } else { -v }]);
                v
            }
            Prop::Var(_) => unreachable!(),
            Prop::Not(x) => -self.define(x),
            Prop::And(xs) => {
                let ls: Vec<Lit> = xs.iter().map(|x| self.define(x)).collect();
                let a = self.new_var() as Lit;
                let mut back = vec![a];
                for &l in &ls {
                    self.clauses.push(vec![-a, l]);
                    back.push(-l);
                }
                self.clauses.push(back);
                a
            }
            Prop::Or(xs) => {
                let ls: Vec<Lit> = xs.iter().map(|x| self.define(x)).collect();
                let a = self.new_var() as Lit;
                let mut fwd = vec![-a];
                for &l in &ls {
                    self.clauses.push(vec![a, -l]);
                    fwd.push(l);
                }
                self.clauses.push(fwd);
                a
            }
            Prop::Iff(x, y) => {
                let (lx, ly) = (self.define(x), self.define(y));
                let a = self.new_var() as Lit;
                self.clauses.push(vec![-a, -lx, ly]);
                self.clauses.push(vec![-a, lx, -ly]);
                self.clauses.push(vec![a, lx, ly]);
                self.clauses.push(vec![a, -lx, -ly]);
                a
            }
        }
    }

    /// Satisfiability under extra unit assumptions. Returns a model indexed by
    /// variable (index 0 unused) when satisfiable.
    pub fn solve(&self, assumptions: &[Lit]) -> Option<Vec<bool>> {
        let mut solver = Dpll {
            clauses: &self.clauses,
            values: vec![0; self.num_vars as usize + 1],
            trail: Vec::new(),
        };
        for &l in assumptions {
            if !solver.assign(l) {
                return None;
            }
        }
        if solver.search() {
            Some(solver.values.iter().map(|&v| v > 0).collect())
        } else {
            None
        }
    }

    pub fn is_satisfiable(&self, assumptions: &[Lit]) -> bool {
        self.solve(assumptions).is_some()
    }
}

struct Dpll<'a> {
    clauses: &'a [Vec<Lit>],
    /// 0 unassigned, 1 true, -1 false.
    values: Vec<i8>,
    trail: Vec<u32>,
}

impl Dpll<'_> {
    fn value(&self, l: Lit) -> i8 {
        let v = self.values[l.unsigned_abs() as usize];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    /// Assigns `l` true; false on conflict with an existing assignment.
    fn assign(&mut self, l: Lit) -> bool {
        match self.value(l) {
            1 => true,
            -1 => false,
            _ => {
                let v = l.unsigned_abs();
                self.values[v as usize] = if l > 0 { 1 } else { -1 };
                self.trail.push(v);
                true
            }
        }
    }

    /// Unit propagation to fixpoint; false on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for clause in self.clauses {
                let mut unassigned = None;
                let mut open = 0;
                let mut satisfied = false;
                for &l in clause {
                    match self.value(l) {
                        1 => {
                            satisfied = true;
                            break;
                        }
                        0 => {
                            open += 1;
                            unassigned = Some(l);
                        }
                        _ => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match open {
                    0 => return false,
                    1 => {
                        self.assign(unassigned.unwrap());
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.values[v as usize] = 0;
        }
    }

    fn pick_branch(&self) -> Option<Lit> {
        for clause in self.clauses {
            if clause.iter().any(|&l| self.value(l) == 1) {
                continue;
            }
            if let Some(&l) = clause.iter().find(|&&l| self.value(l) == 0) {
                return Some(l);
            }
        }
        None
    }

    fn search(&mut self) -> bool {
        if !self.propagate() {
            return false;
        }
        let Some(l) = self.pick_branch() else {
            // Every clause satisfied; unconstrained variables default to false.
            return true;
        };
        for choice in [l, -l] {
            let mark = self.trail.len();
            self.assign(choice);
            if self.search() {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}
