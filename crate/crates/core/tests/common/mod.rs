//! Random small instances and a brute-force entailment oracle that enumerates
//! every constant subset and every truth assignment directly.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use kentail::logic::{Formula, Matrix, Quantifier, Term};
use kentail::reasoner::{parse_gamma, Gamma};
use kentail::{
    apply_mask, parse_theory, Example, GroundAtom, GroundLiteral, MaskedExample, Masker, Predicate, Theory,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

#[derive(Debug, Clone)]
pub struct Instance {
    pub example: Example,
    pub masked: MaskedExample,
    pub theory: Theory,
    pub target: Predicate,
    pub k: usize,
    pub gamma: Gamma,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_matrix(rng: &mut ChaCha8Rng, preds: &[Predicate], vars: &[&str], depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.35) {
        let p = preds.choose(rng).unwrap();
        let args: Vec<&str> = (0..p.arity).map(|_| *vars.choose(rng).unwrap()).collect();
        return format!("{}({})", p.name, args.join(","));
    }
    let a = random_matrix(rng, preds, vars, depth - 1);
    match rng.gen_range(0..5) {
        0 => format!("!{a}"),
        op => {
            let b = random_matrix(rng, preds, vars, depth - 1);
            let sym = ["&", "|", "->", "<->"][op - 1];
            format!("({a} {sym} {b})")
        }
    }
}

fn random_formula(rng: &mut ChaCha8Rng, preds: &[Predicate]) -> String {
    let vars: Vec<&str> = ["X", "Y"][..rng.gen_range(1..=2)].to_vec();
    let mut prefix = String::new();
    for v in &vars {
        let q = if rng.gen_bool(0.6) { "forall" } else { "exists" };
        prefix.push_str(&format!("{q} {v}: "));
    }
    format!("{prefix}{}", random_matrix(rng, preds, &vars, 2))
}

pub fn random_predicates(rng: &mut ChaCha8Rng) -> Vec<Predicate> {
    let count = rng.gen_range(1..=2);
    (0..count)
        .map(|i| Predicate::new(["p", "r"][i], rng.gen_range(1..=2)))
        .collect()
}

/// Random example over `d` constants with each ground atom present with probability `density`.
pub fn random_example(rng: &mut ChaCha8Rng, d: usize, preds: &[Predicate], density: f64) -> Example {
    let mut atoms = Vec::new();
    for p in preds {
        for_tuples(d, p.arity, &mut |t| {
            if rng.gen_bool(density) {
                atoms.push(GroundAtom::new(p.name.clone(), t.iter().map(|&i| NAMES[i].to_string()).collect()));
            }
        });
    }
    Example::new(NAMES[..d].iter().copied(), preds, &atoms).unwrap()
}

pub fn random_theory(rng: &mut ChaCha8Rng, preds: &[Predicate]) -> Theory {
    let n = rng.gen_range(1..=2);
    let text: Vec<String> = (0..n).map(|_| random_formula(rng, preds)).collect();
    parse_theory(&text.join("\n")).unwrap()
}

pub fn random_instance(seed: u64) -> Instance {
    let mut rng = rng(seed);
    let d = rng.gen_range(1..=5);
    let mut preds = random_predicates(&mut rng);
    if d == 1 {
        preds[0].arity = 1;
    }
    let density = rng.gen_range(0.2..0.7);
    let example = random_example(&mut rng, d, &preds, density);
    let masked = apply_mask(
        &Masker::RandomDrop {
            p: rng.gen_range(0.2..0.9),
            seed: rng.gen(),
        },
        &example,
    )
    .unwrap();
    let theory = random_theory(&mut rng, &preds);
    let candidates: Vec<&Predicate> = preds.iter().filter(|p| p.arity <= d.min(3)).collect();
    let target = (*candidates.choose(&mut rng).unwrap()).clone();
    let k = rng.gen_range(target.arity..=d.min(3));
    let gamma = parse_gamma(["0", "1/10", "1/4", "1/2", "2/3", "1"].choose(&mut rng).unwrap()).unwrap();
    Instance {
        example,
        masked,
        theory,
        target,
        k,
        gamma,
    }
}

pub fn for_tuples(n: usize, arity: usize, f: &mut impl FnMut(&[usize])) {
    if n == 0 && arity > 0 {
        return;
    }
    let mut t = vec![0; arity];
    loop {
        f(&t);
        let mut i = arity;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            t[i] += 1;
            if t[i] < n {
                break;
            }
            t[i] = 0;
        }
    }
}

/// Subsets of `0..n` as bitmasks, ordered by size and then lexicographically.
pub fn subsets_by_size(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u32..1 << n)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| s.len() <= max)
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    all
}

fn eval_matrix(m: &Matrix, env: &HashMap<&str, usize>, holds: &dyn Fn(&str, &[usize]) -> bool) -> bool {
    match m {
        Matrix::Atom(a) => {
            let args: Vec<usize> = a
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => env[v.as_str()],
                    Term::Const(c) => panic!("constant {c} in oracle input"),
                })
                .collect();
            holds(&a.predicate, &args)
        }
        Matrix::Not(x) => !eval_matrix(x, env, holds),
        Matrix::And(xs) => xs.iter().all(|x| eval_matrix(x, env, holds)),
        Matrix::Or(xs) => xs.iter().any(|x| eval_matrix(x, env, holds)),
        Matrix::Implies(a, b) => !eval_matrix(a, env, holds) || eval_matrix(b, env, holds),
        Matrix::Iff(a, b) => eval_matrix(a, env, holds) == eval_matrix(b, env, holds),
    }
}

fn eval_prefix<'f>(
    f: &'f Formula,
    i: usize,
    domain: &[usize],
    env: &mut HashMap<&'f str, usize>,
    holds: &dyn Fn(&str, &[usize]) -> bool,
) -> bool {
    let Some((q, v)) = f.prefix().get(i) else {
        return eval_matrix(f.matrix(), env, holds);
    };
    let mut any = false;
    let mut all = true;
    for &c in domain {
        env.insert(v.as_str(), c);
        let r = eval_prefix(f, i + 1, domain, env, holds);
        any |= r;
        all &= r;
    }
    env.remove(v.as_str());
    match q {
        Quantifier::Forall => all,
        Quantifier::Exists => any,
    }
}

/// Closed-world truth of a formula over `domain` (indices into [`NAMES`]).
pub fn eval_formula(f: &Formula, domain: &[usize], holds: &dyn Fn(&str, &[usize]) -> bool) -> bool {
    eval_prefix(f, 0, domain, &mut HashMap::new(), holds)
}

pub type Lit = (GroundAtom, bool);

/// Brute-force Def. of k-entailment and voting over one instance.
pub struct Oracle {
    pub domain_size: usize,
    pub k: usize,
    /// Entailed target literals of every consistent subset of size at most k; inconsistent subsets map to nothing.
    pub entailed: BTreeMap<Vec<usize>, BTreeSet<Lit>>,
    /// Subsets in (size, lex) order.
    pub order: Vec<Vec<usize>>,
}

impl Oracle {
    pub fn new(inst: &Instance, positive_only: bool) -> Oracle {
        let d = inst.masked.domain().len();
        let preds = inst.masked.predicates().to_vec();
        let order = subsets_by_size(d, inst.k);
        let mut entailed = BTreeMap::new();
        for s in &order {
            entailed.insert(s.clone(), Self::entailed_at(inst, &preds, s, positive_only));
        }
        Oracle {
            domain_size: d,
            k: inst.k,
            entailed,
            order,
        }
    }

    fn entailed_at(inst: &Instance, preds: &[Predicate], s: &[usize], positive_only: bool) -> BTreeSet<Lit> {
        let mut atoms: Vec<(String, Vec<usize>)> = Vec::new();
        for p in preds {
            for_tuples(s.len(), p.arity, &mut |t| atoms.push((p.name.clone(), t.iter().map(|&i| s[i]).collect())));
        }
        let index: HashMap<(String, Vec<usize>), usize> =
            atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let ground = |(p, args): &(String, Vec<usize>)| {
            GroundAtom::new(p.clone(), args.iter().map(|&i| NAMES[i].to_string()).collect())
        };
        let mut fixed: Vec<Option<bool>> = vec![None; atoms.len()];
        for l in inst.masked.literals() {
            let args: Option<Vec<usize>> = l
                .atom
                .args
                .iter()
                .map(|c| NAMES.iter().position(|n| n == c).filter(|i| s.contains(i)))
                .collect();
            if let Some(args) = args {
                fixed[index[&(l.atom.predicate.clone(), args)]] = Some(l.positive);
            }
        }
        let free: Vec<usize> = (0..atoms.len()).filter(|&i| fixed[i].is_none()).collect();
        let mut models: Vec<Vec<bool>> = Vec::new();
        for bits in 0u64..1 << free.len() {
            let mut model: Vec<bool> = fixed.iter().map(|f| f.unwrap_or(false)).collect();
            for (j, &i) in free.iter().enumerate() {
                model[i] = bits >> j & 1 == 1;
            }
            let holds = |p: &str, args: &[usize]| {
                index
                    .get(&(p.to_string(), args.to_vec()))
                    .is_some_and(|&i| model[i])
            };
            if inst.theory.formulas().iter().all(|f| eval_formula(f, s, &holds)) {
                models.push(model);
            }
        }
        let mut out = BTreeSet::new();
        if models.is_empty() {
            return out;
        }
        for (i, a) in atoms.iter().enumerate() {
            if a.0 != inst.target.name {
                continue;
            }
            if models.iter().all(|m| m[i]) {
                out.insert((ground(a), true));
            }
            if !positive_only && models.iter().all(|m| !m[i]) {
                out.insert((ground(a), false));
            }
        }
        out
    }

    /// All k-entailed literals with their first witness.
    pub fn k_entailed(&self) -> BTreeMap<Lit, Vec<String>> {
        let mut out = BTreeMap::new();
        for s in &self.order {
            for l in &self.entailed[s] {
                out.entry(l.clone())
                    .or_insert_with(|| s.iter().map(|&i| NAMES[i].to_string()).collect());
            }
        }
        out
    }

    /// Number of size-k subsets whose subsets entail each literal.
    pub fn votes(&self) -> BTreeMap<Lit, u128> {
        let mut out = BTreeMap::new();
        for s in self.order.iter().filter(|s| s.len() == self.k) {
            let mut union = BTreeSet::new();
            for (c, lits) in &self.entailed {
                if c.iter().all(|x| s.contains(x)) {
                    union.extend(lits.iter().cloned());
                }
            }
            for l in union {
                *out.entry(l).or_insert(0) += 1;
            }
        }
        out
    }

    /// Literals accepted by voting with parameter `gamma` for a target of arity `a`.
    pub fn voting(&self, gamma: Gamma, a: usize) -> BTreeMap<Lit, u128> {
        let scale = (self.domain_size as u128).pow((self.k - a) as u32);
        self.votes()
            .into_iter()
            .filter(|(_, v)| {
                *v >= 1 && *v * (*gamma.denom() as u128) >= (*gamma.numer() as u128) * scale
            })
            .collect()
    }
}

pub fn lit_key(l: &GroundLiteral) -> Lit {
    (l.atom.clone(), l.positive)
}
