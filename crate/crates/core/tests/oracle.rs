//! The reasoner against the brute-force oracle on random small instances.

mod common;

use common::{lit_key, random_instance, Oracle, NAMES};
use kentail::reasoner::{k_entailed_literals, k_entails, vote_count, voting_entailed_literals};
use kentail::sampling::for_each_tuple;
use kentail::{GroundAtom, GroundLiteral};

pub const INSTANCES: u64 = 600;

#[test]
fn k_entailment_matches_oracle() {
    let mut mismatches = Vec::new();
    let mut derived_beyond_evidence = 0;
    for seed in 0..INSTANCES {
        let inst = random_instance(seed);
        let positive_only = seed % 5 == 0;
        let oracle = Oracle::new(&inst, positive_only);
        let expected = oracle.k_entailed();
        if expected
            .keys()
            .any(|(a, s)| !inst.masked.contains(&GroundLiteral::new(a.clone(), *s)))
        {
            derived_beyond_evidence += 1;
        }

        let got = k_entailed_literals(&inst.masked, &inst.theory, inst.k, &inst.target, positive_only).unwrap();
        let got: std::collections::BTreeMap<_, _> =
            got.literals.iter().map(|d| (lit_key(&d.literal), d.witness.clone())).collect();
        if got != expected {
            mismatches.push(seed);
        }
        // Every ground literal of the target, both signs, through the single-literal entry point.
        let d = inst.masked.domain().len();
        for_each_tuple(d, inst.target.arity, |t| {
            let atom = GroundAtom::new(inst.target.name.clone(), t.iter().map(|&i| NAMES[i].to_string()).collect());
            for sign in [true, false] {
                let l = GroundLiteral::new(atom.clone(), sign);
                if positive_only && !sign {
                    continue;
                }
                let w = k_entails(&inst.masked, &inst.theory, inst.k, &l);
                let w = match w {
                    Ok(w) => w,
                    // Literals mentioning more than k constants are rejected up front.
                    Err(_) => {
                        assert!(atom.constants().len() > inst.k, "seed {seed}: unexpected error");
                        continue;
                    }
                };
                if w.as_ref() != expected.get(&(atom.clone(), sign)) {
                    mismatches.push(seed);
                }
            }
        });
    }
    mismatches.dedup();
    assert!(mismatches.is_empty(), "mismatching seeds: {mismatches:?}");
    println!("{derived_beyond_evidence} instances derive literals beyond the evidence");
    assert!(derived_beyond_evidence >= 50, "{derived_beyond_evidence}");
}

#[test]
fn voting_matches_oracle() {
    let mut mismatches = Vec::new();
    for seed in 0..INSTANCES {
        let inst = random_instance(seed);
        let oracle = Oracle::new(&inst, false);
        let expected = oracle.voting(inst.gamma, inst.target.arity);
        let got =
            voting_entailed_literals(&inst.masked, &inst.theory, inst.k, inst.gamma, &inst.target, false).unwrap();
        let got: std::collections::BTreeMap<_, _> =
            got.literals.iter().map(|d| (lit_key(&d.literal), d.votes.unwrap())).collect();
        if got != expected {
            mismatches.push(seed);
        }
        for ((atom, sign), v) in oracle.votes() {
            let l = GroundLiteral::new(atom, sign);
            if vote_count(&inst.masked, &inst.theory, inst.k, &l).unwrap() != v {
                mismatches.push(seed);
            }
        }
    }
    mismatches.dedup();
    assert!(mismatches.is_empty(), "mismatching seeds: {mismatches:?}");
}
