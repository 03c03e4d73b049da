//! Scenario generators and their default hypothesis classes.

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::example::Example;
use crate::logic::{parse_theory, GroundAtom, Predicate, Theory};
use crate::sampling::{binomial, for_each_tuple, rng_for};

/// Built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    RareClique,
    RareChain,
    Smokers,
    Random,
}

impl Scenario {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "rare-clique" => Ok(Scenario::RareClique),
            "rare-chain" => Ok(Scenario::RareChain),
            "smokers" => Ok(Scenario::Smokers),
            "random" => Ok(Scenario::Random),
            _ => Err(Error::InvalidParameter(format!("unknown scenario `{s}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario::RareClique => "rare-clique",
            Scenario::RareChain => "rare-chain",
            Scenario::Smokers => "smokers",
            Scenario::Random => "random",
        }
    }

    /// The scenario's example with `n` constants. `density` and `seed` only affect
    /// the random scenarios.
    pub fn generate(self, n: usize, density: f64, seed: u64) -> Result<Example> {
        match self {
            Scenario::RareClique => gen_rare_clique(n),
            Scenario::RareChain => gen_rare_chain(n),
            Scenario::Smokers => gen_random_smokers(n, density, seed),
            Scenario::Random => gen_random(n, &random_vocabulary(), density, seed),
        }
    }

    pub fn target(self) -> Predicate {
        match self {
            Scenario::RareClique | Scenario::RareChain => Predicate::new("rare", 1),
            Scenario::Smokers => Predicate::new("sm", 1),
            Scenario::Random => Predicate::new("q", 1),
        }
    }

    /// Four hand-built theories per scenario, the first being the scenario's main rule.
    pub fn hypotheses(self) -> Vec<Theory> {
        let sources: [&str; 4] = match self {
            Scenario::RareClique => [
                "forall X, Y: rare(X) -> rare(Y)",
                "forall X, Y: rare(X) -> !rare(Y)",
                "forall X: !rare(X)",
                "forall X: rare(X)",
            ],
            Scenario::RareChain => [
                "forall X, Y: rare(X) & e(X,Y) -> rare(Y)",
                "forall X, Y: rare(X) & e(X,Y) -> !rare(Y)",
                "forall X: !rare(X)",
                "forall X, Y: e(X,Y) -> rare(X)",
            ],
            Scenario::Smokers => [
                "forall X, Y: sm(X) & fr(X,Y) -> sm(Y)",
                "forall X: sm(X)",
                "forall X: !sm(X)",
                "forall X, Y: fr(X,Y) -> !sm(Y)",
            ],
            Scenario::Random => [
                "forall X, Y: p(X) & r(X,Y) -> q(Y)",
                "forall X: p(X) -> q(X)",
                "forall X: !q(X)",
                "forall X, Y: r(X,Y) -> r(Y,X)",
            ],
        };
        sources.iter().map(|s| parse_theory(s).unwrap()).collect()
    }
}

/// Constant names `c1..cn`.
pub fn numbered_constants(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("c{i}")).collect()
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("scenario needs at least 2 constants, got {n}")));
    }
    Ok(())
}

/// `{rare(c1)}` over `c1..cn`.
pub fn gen_rare_clique(n: usize) -> Result<Example> {
    check_size(n)?;
    Example::new(
        numbered_constants(n),
        &[Predicate::new("rare", 1)],
        &[GroundAtom::new("rare", vec!["c1".into()])],
    )
}

/// `{rare(c1), e(c1,c2), …, e(c_{n−1},c_n)}` over `c1..cn`.
pub fn gen_rare_chain(n: usize) -> Result<Example> {
    check_size(n)?;
    let names = numbered_constants(n);
    let mut atoms = vec![GroundAtom::new("rare", vec!["c1".into()])];
    for w in names.windows(2) {
        atoms.push(GroundAtom::new("e", vec![w[0].clone(), w[1].clone()]));
    }
    Example::new(names, &[Predicate::new("e", 2), Predicate::new("rare", 1)], &atoms)
}

/// A smokers example with the given friendships and smokers.
pub fn gen_smokers(people: &[&str], friendships: &[(&str, &str)], smokers: &[&str]) -> Result<Example> {
    let mut atoms: Vec<GroundAtom> = friendships
        .iter()
        .map(|(a, b)| GroundAtom::new("fr", vec![a.to_string(), b.to_string()]))
        .collect();
    atoms.extend(smokers.iter().map(|s| GroundAtom::new("sm", vec![s.to_string()])));
    Example::new(
        people.iter().copied(),
        &[Predicate::new("fr", 2), Predicate::new("sm", 1)],
        &atoms,
    )
}

/// Smokers over `c1..cn` with friendships of the given density and a third of people smoking.
fn gen_random_smokers(n: usize, density: f64, seed: u64) -> Result<Example> {
    check_size(n)?;
    let mut rng = rng_for(seed, 0);
    let names = numbered_constants(n);
    let mut atoms = Vec::new();
    for a in &names {
        for b in &names {
            if a != b && rng.gen::<f64>() < density {
                atoms.push(GroundAtom::new("fr", vec![a.clone(), b.clone()]));
            }
        }
    }
    for a in &names {
        if rng.gen::<f64>() < 1.0 / 3.0 {
            atoms.push(GroundAtom::new("sm", vec![a.clone()]));
        }
    }
    Example::new(
        names,
        &[Predicate::new("fr", 2), Predicate::new("sm", 1)],
        &atoms,
    )
}

/// The vocabulary of the random scenario: `p/1`, `q/1`, `r/2`.
pub fn random_vocabulary() -> Vec<Predicate> {
    vec![Predicate::new("p", 1), Predicate::new("q", 1), Predicate::new("r", 2)]
}

/// Each ground atom over `vocab` and `c1..cn` present independently with probability `density`.
pub fn gen_random(n: usize, vocab: &[Predicate], density: f64, seed: u64) -> Result<Example> {
    check_size(n)?;
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameter(format!("density {density} not in [0,1]")));
    }
    let mut rng = rng_for(seed, 0);
    let names = numbered_constants(n);
    let mut vocab = vocab.to_vec();
    vocab.sort();
    let mut atoms = Vec::new();
    for p in &vocab {
        for_each_tuple(n, p.arity, |t| {
            if rng.gen::<f64>() < density {
                atoms.push(GroundAtom::new(
                    p.name.clone(),
                    t.iter().map(|&i| names[i].clone()).collect(),
                ));
            }
        });
    }
    Example::new(names, &vocab, &atoms)
}

/// The three-person smokers example: `fr(alice,bob), sm(alice), sm(eve)`.
pub fn smokers_example() -> Example {
    gen_smokers(&["alice", "bob", "eve"], &[("alice", "bob")], &["alice", "eve"]).unwrap()
}

/// Size-k subsets of a rare-clique with `r` rare constants out of `n` that falsify
/// `∀X,Y: rare(X) → rare(Y)`: those mixing rare and non-rare constants.
pub fn rare_clique_failing(n: u64, r: u64, k: u64) -> u128 {
    binomial(n, k) - binomial(r, k) - binomial(n - r, k)
}

/// Size-k subsets of a rare-chain of length `n` falsifying the chain rule: those containing c1 and c2.
pub fn rare_chain_failing(n: u64, k: u64) -> u128 {
    if k < 2 {
        0
    } else {
        binomial(n - 2, k - 2)
    }
}

/// `1 − failing/C(n,k)` as an exact fraction.
pub fn accuracy_from_failing(n: u64, k: u64, failing: u128) -> Ratio<u128> {
    let total = binomial(n, k);
    Ratio::new(total - failing, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fragments::{q_exact, q_exact_by_enumeration};
    use crate::parse_example;

    #[test]
    fn chain_shapes() {
        let c2 = gen_rare_chain(2).unwrap();
        assert_eq!(c2.atoms().len(), 2);
        let c5 = gen_rare_chain(5).unwrap();
        let text = c5.to_string();
        assert_eq!(parse_example(&text).unwrap(), c5);
        assert!(text.contains("e(c4,c5)."));
        assert!(gen_rare_chain(1).is_err());
    }

    #[test]
    fn closed_forms_match_enumeration() {
        let rule = Scenario::RareClique.hypotheses().remove(0);
        for n in [2u64, 5, 9] {
            for k in 1..=3u64.min(n) {
                let q = q_exact_by_enumeration(&gen_rare_clique(n as usize).unwrap(), k as usize, &rule)
                    .unwrap();
                assert_eq!(q.ratio(), accuracy_from_failing(n, k, rare_clique_failing(n, 1, k)));
            }
        }
        let chain = Scenario::RareChain.hypotheses().remove(0);
        let q = q_exact_by_enumeration(&gen_rare_chain(100).unwrap(), 2, &chain).unwrap();
        assert_eq!(q.ratio(), Ratio::new(4949, 4950));
        assert_eq!(q.ratio(), accuracy_from_failing(100, 2, rare_chain_failing(100, 2)));
    }

    #[test]
    fn million_constant_accuracy() {
        let q = accuracy_from_failing(1_000_000, 2, rare_clique_failing(1_000_000, 1, 2));
        assert_eq!(q, Ratio::new(999_998, 1_000_000));
        let direct = q_exact(&gen_rare_clique(1_000_000).unwrap(), 2, &Scenario::RareClique.hypotheses()[0])
            .unwrap();
        assert_eq!(direct.ratio(), q);
    }

    #[test]
    fn random_is_seeded() {
        let v = random_vocabulary();
        let a = gen_random(12, &v, 0.2, 4).unwrap();
        assert_eq!(a, gen_random(12, &v, 0.2, 4).unwrap());
        assert_ne!(a, gen_random(12, &v, 0.2, 5).unwrap());
        assert_eq!(gen_random(6, &v, 0.0, 1).unwrap().atom_count(), 0);
        assert_eq!(gen_random(6, &v, 1.0, 1).unwrap().atom_count(), 6 + 6 + 36);
    }
}
