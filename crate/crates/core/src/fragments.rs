//! Fragments of examples and the fragment-frequency accuracy `Q_{E,k}(Φ)`:
//! the fraction of size-`k` constant subsets whose fragment satisfies `⋀Φ`.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::example::{ConstId, Example};
use crate::logic::{CompiledTheory, Theory};
use crate::sampling::{binomial, for_each_combination, partial_shuffle, rng_for};

/// Default cap on subset evaluations for exact enumeration.
pub const DEFAULT_EXACT_BUDGET: u128 = 10_000_000;

/// An example restricted to a subset of its constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub example: Example,
    /// The constant subset, sorted.
    pub subset: Vec<String>,
    pub parent_domain_size: usize,
}

/// The fragment induced by `subset`: its domain is `subset` and its atoms are
/// the parent's atoms that mention only constants of `subset`.
pub fn restrict<S: AsRef<str>>(example: &Example, subset: &[S]) -> Result<Fragment> {
    let mut ids = example.ids_of(subset)?;
    ids.sort_unstable();
    ids.dedup();
    let fragment = example.restrict_ids(&ids);
    Ok(Fragment {
        subset: fragment.domain().to_vec(),
        example: fragment,
        parent_domain_size: example.domain_size(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    Exact,
    MonteCarlo,
}

/// A value of `Q`, exact or sampled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityEstimate {
    pub value: f64,
    pub mode: EstimateMode,
    pub k: usize,
    /// Exact mode: number of satisfying size-k subsets. Monte Carlo: number of satisfying draws.
    pub satisfying: u128,
    /// Exact mode: C(|domain|, k). Monte Carlo: number of draws.
    pub total: u128,
    pub trials: Option<u64>,
    /// FNV-1a digest of the printed theory.
    pub theory_digest: String,
}

impl ProbabilityEstimate {
    /// The exact value in lowest terms (exact mode), or the sample mean as a fraction.
    pub fn ratio(&self) -> Ratio<u128> {
        Ratio::new(self.satisfying, self.total)
    }

    pub fn is_exact(&self) -> bool {
        self.mode == EstimateMode::Exact
    }
}

impl fmt::Display for ProbabilityEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.ratio();
        write!(f, "{}/{} ({:.6})", r.numer(), r.denom(), self.value)
    }
}

pub fn theory_digest(theory: &Theory) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in theory.to_string().bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

fn check_inputs(example: &Example, k: usize, theory: &Theory) -> Result<()> {
    if k > example.domain_size() {
        return Err(Error::FragmentTooLarge {
            k,
            domain: example.domain_size(),
        });
    }
    if let Some(c) = theory.constants().into_iter().next() {
        return Err(Error::TheoryHasConstants(c));
    }
    Ok(())
}

/// Number of subset evaluations [`q_exact`] performs on this example.
///
/// Constants that occur in no atom are interchangeable in a constant-free
/// formula, so all subsets that agree on their non-isolated part are decided
/// by one evaluation.
pub fn exact_work(example: &Example, k: usize) -> u128 {
    let isolated = example.isolated_mask();
    let free = isolated.iter().filter(|&&b| b).count() as u64;
    let busy = isolated.len() as u64 - free;
    (0..=k as u64)
        .filter(|&t| t <= busy && k as u64 - t <= free)
        .map(|t| binomial(busy, t))
        .fold(0u128, |a, b| a.saturating_add(b))
}

/// Exact `Q_{E,k}(Φ)` with the default budget.
pub fn q_exact(example: &Example, k: usize, theory: &Theory) -> Result<ProbabilityEstimate> {
    q_exact_with_budget(example, k, theory, u128::MAX)
}

/// Exact `Q_{E,k}(Φ)`, refusing when more than `budget` subset evaluations are needed.
pub fn q_exact_with_budget(
    example: &Example,
    k: usize,
    theory: &Theory,
    budget: u128,
) -> Result<ProbabilityEstimate> {
    check_inputs(example, k, theory)?;
    let required = exact_work(example, k);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let compiled = CompiledTheory::new(example, theory)?;
    let all: Vec<ConstId> = (0..example.domain_size() as ConstId).collect();
    let satisfying = count_satisfying(example, &compiled, k, &all, &example.isolated_mask());
    Ok(ProbabilityEstimate {
        value: satisfying as f64 / binomial(example.domain_size() as u64, k as u64) as f64,
        mode: EstimateMode::Exact,
        k,
        satisfying,
        total: binomial(example.domain_size() as u64, k as u64),
        trials: None,
        theory_digest: theory_digest(theory),
    })
}

/// Number of size-k subsets of `ids` whose fragment satisfies `compiled`.
///
/// `isolated` flags constants that occur in no atom of `example`; it may be
/// computed on any superset of `ids`, since a constant isolated there is
/// isolated in every fragment.
pub(crate) fn count_satisfying(
    example: &Example,
    compiled: &CompiledTheory,
    k: usize,
    ids: &[ConstId],
    isolated: &[bool],
) -> u128 {
    let (free, busy): (Vec<ConstId>, Vec<ConstId>) =
        ids.iter().partition(|&&c| isolated[c as usize]);
    let mut satisfying: u128 = 0;
    let mut domain: Vec<ConstId> = Vec::with_capacity(k);
    for t in 0..=k.min(busy.len()) {
        let fill = k - t;
        if fill > free.len() {
            continue;
        }
        let weight = binomial(free.len() as u64, fill as u64);
        for_each_combination(busy.len(), t, |combo| {
            domain.clear();
            domain.extend(combo.iter().map(|&i| busy[i]));
            domain.extend_from_slice(&free[..fill]);
            domain.sort_unstable();
            if compiled.eval(example, &domain) {
                satisfying += weight;
            }
        });
    }
    satisfying
}

/// Exact `Q` by visiting every size-k subset in lexicographic order, one evaluation each.
///
/// Slower than [`q_exact`]; kept as an independent cross-check.
pub fn q_exact_by_enumeration(
    example: &Example,
    k: usize,
    theory: &Theory,
) -> Result<ProbabilityEstimate> {
    check_inputs(example, k, theory)?;
    let compiled = CompiledTheory::new(example, theory)?;
    let mut satisfying: u128 = 0;
    let mut total: u128 = 0;
    let mut domain: Vec<ConstId> = Vec::with_capacity(k);
    for_each_combination(example.domain_size(), k, |combo| {
        domain.clear();
        domain.extend(combo.iter().map(|&i| i as ConstId));
        total += 1;
        if compiled.eval(example, &domain) {
            satisfying += 1;
        }
    });
    Ok(ProbabilityEstimate {
        value: satisfying as f64 / total as f64,
        mode: EstimateMode::Exact,
        k,
        satisfying,
        total,
        trials: None,
        theory_digest: theory_digest(theory),
    })
}

/// Monte Carlo estimate of `Q` from `trials` uniform size-k subsets.
///
/// Trial `i` draws from stream `i` of `seed`.
pub fn q_monte_carlo(
    example: &Example,
    k: usize,
    theory: &Theory,
    trials: u64,
    seed: u64,
) -> Result<ProbabilityEstimate> {
    check_inputs(example, k, theory)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let compiled = CompiledTheory::new(example, theory)?;
    let n = example.domain_size();
    let mut hits: u128 = 0;
    let mut domain: Vec<ConstId> = Vec::with_capacity(k);
    for i in 0..trials {
        let mut rng = rng_for(seed, i);
        domain.clear();
        domain.extend(partial_shuffle(&mut rng, n, k).into_iter().map(|c| c as ConstId));
        if compiled.eval(example, &domain) {
            hits += 1;
        }
    }
    Ok(ProbabilityEstimate {
        value: hits as f64 / trials as f64,
        mode: EstimateMode::MonteCarlo,
        k,
        satisfying: hits,
        total: trials as u128,
        trials: Some(trials),
        theory_digest: theory_digest(theory),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::parse_example;
    use crate::logic::parse_theory;

    fn smokers() -> Example {
        parse_example("domain: alice bob eve\nfr(alice,bob).\nsm(alice).\nsm(eve).").unwrap()
    }

    fn chain5() -> Example {
        parse_example("domain: c1 c2 c3 c4 c5\nrare(c1).\ne(c1,c2).\ne(c2,c3).\ne(c3,c4).\ne(c4,c5).")
            .unwrap()
    }

    #[test]
    fn restrict_examples() {
        let f = restrict(&smokers(), &["eve", "alice"]).unwrap();
        assert_eq!(f.subset, vec!["alice", "eve"]);
        assert_eq!(f.example.atoms().len(), 2);
        assert!(f.example.holds(&crate::GroundAtom::parse("sm(eve)").unwrap()));

        let whole = restrict(&smokers(), smokers().domain()).unwrap();
        assert_eq!(whole.example, smokers());

        let empty = restrict(&chain5(), &["c2", "c4"]).unwrap();
        assert_eq!(empty.example.atom_count(), 0);

        assert_eq!(
            restrict(&smokers(), &["zed"]),
            Err(Error::NotASubset("zed".into()))
        );
    }

    #[test]
    fn smokers_probabilities() {
        let all = parse_theory("forall X: sm(X)").unwrap();
        let fr = parse_theory("exists X, Y: fr(X,Y)").unwrap();
        let q = q_exact(&smokers(), 1, &all).unwrap();
        assert_eq!(q.ratio(), Ratio::new(2, 3));
        assert_eq!((q.satisfying, q.total), (2, 3));
        assert_eq!(q_exact(&smokers(), 2, &all).unwrap().ratio(), Ratio::new(1, 3));
        assert_eq!(q_exact(&smokers(), 2, &fr).unwrap().ratio(), Ratio::new(1, 3));
    }

    #[test]
    fn k_too_large() {
        let t = parse_theory("forall X: sm(X)").unwrap();
        assert_eq!(
            q_exact(&smokers(), 4, &t),
            Err(Error::FragmentTooLarge { k: 4, domain: 3 })
        );
    }

    #[test]
    fn budget_refusal() {
        let t = parse_theory("forall X: sm(X)").unwrap();
        assert!(matches!(
            q_exact_with_budget(&smokers(), 2, &t, 1),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn grouping_agrees_with_enumeration() {
        let ex = parse_example(
            "domain: a b c d e f g\np(a).\nq(a,b).\nq(c,c).\np(d).",
        )
        .unwrap();
        for src in [
            "forall X, Y: p(X) -> p(Y)",
            "exists X: p(X) | q(X,X)",
            "forall X: exists Y: q(X,Y) | !p(X)",
        ] {
            let t = parse_theory(src).unwrap();
            for k in 0..=7 {
                assert_eq!(
                    q_exact(&ex, k, &t).unwrap(),
                    q_exact_by_enumeration(&ex, k, &t).unwrap(),
                    "{src} k={k}"
                );
            }
        }
    }

    #[test]
    fn monte_carlo_edge_cases() {
        let t = parse_theory("forall X: sm(X) | !sm(X)").unwrap();
        assert_eq!(q_monte_carlo(&smokers(), 2, &t, 50, 1).unwrap().value, 1.0);
        let all = parse_theory("forall X: sm(X)").unwrap();
        assert_eq!(q_monte_carlo(&smokers(), 3, &all, 20, 1).unwrap().value, 0.0);
        assert!(q_monte_carlo(&smokers(), 1, &all, 0, 1).is_err());
    }

    #[test]
    fn constants_rejected() {
        let t = parse_theory("sm(alice)").unwrap();
        assert_eq!(
            q_exact(&smokers(), 1, &t),
            Err(Error::TheoryHasConstants("alice".into()))
        );
    }
}
