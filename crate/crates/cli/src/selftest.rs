//! Worked examples with known answers.

use std::process::ExitCode;

use num_rational::Ratio;
use serde::Serialize;
use serde_json::json;

use kentail::bounds::worst_case_k;
use kentail::harness::generators::{accuracy_from_failing, rare_clique_failing};
use kentail::harness::{
    eliminate_constants, gen_rare_chain, gen_rare_clique, smokers_example, Scenario, SCHEMA_VERSION,
};
use kentail::reasoner::{
    false_entailed, k_entails, parse_gamma, vote_count, vote_threshold, voting_entailed_literals,
};
use kentail::{
    apply_mask, parse_masked_example, parse_theory, q_exact, GroundLiteral, Masker, Predicate, Result,
};

use crate::Format;

#[derive(Serialize)]
struct Check {
    name: &'static str,
    expected: String,
    actual: String,
    pass: bool,
}

fn check(name: &'static str, expected: impl ToString, actual: impl ToString) -> Check {
    let (expected, actual) = (expected.to_string(), actual.to_string());
    Check {
        name,
        pass: expected == actual,
        expected,
        actual,
    }
}

fn checks() -> Result<Vec<Check>> {
    let smokers = smokers_example();
    let all_smoke = parse_theory("forall X: sm(X)")?;
    let some_friends = parse_theory("exists X, Y: fr(X,Y)")?;
    let rule = parse_theory("forall X, Y: sm(X) & fr(X,Y) -> sm(Y)")?;
    let sm_bob = GroundLiteral::parse("sm(bob)")?;
    let sm = Predicate::new("sm", 1);
    let kappa = parse_masked_example("domain: alice bob eve\nfr(alice,bob)\nsm(alice)")?;
    let augmented =
        parse_masked_example("domain: alice bob eve\nfr(alice,bob)\nfr(eve,bob)\nsm(alice)\nsm(eve)")?;
    let gamma = parse_gamma("2/3")?;

    let rare = Predicate::new("rare", 1);
    let clique = gen_rare_clique(100)?;
    let clique_rule = Scenario::RareClique.hypotheses().remove(0);
    let positive = apply_mask(&Masker::PositiveOnly(vec!["rare".into()]), &clique)?;
    let clique_q = q_exact(&clique, 2, &clique_rule)?;
    let clique_false = false_entailed(&clique, &positive, &clique_rule, 2, None, &rare, false)?;
    let prop3 = worst_case_k(clique_q.value, 100, 2, 1)?;

    let chain = gen_rare_chain(100)?;
    let chain_rule = Scenario::RareChain.hypotheses().remove(0);
    let chain_mask = apply_mask(&Masker::PositiveOnly(vec!["rare".into(), "e".into()]), &chain)?;
    let chain_false = false_entailed(&chain, &chain_mask, &chain_rule, 2, None, &rare, false)?;

    let friend_rule = parse_theory("forall X: fr(alice,X) -> !sm(X)")?;
    let (eliminated, _) = eliminate_constants(&friend_rule, &smokers)?;

    Ok(vec![
        check("q1 all smoke", "2/3", q_exact(&smokers, 1, &all_smoke)?.ratio()),
        check("q2 all smoke", "1/3", q_exact(&smokers, 2, &all_smoke)?.ratio()),
        check("q2 some friendship", "1/3", q_exact(&smokers, 2, &some_friends)?.ratio()),
        check("sm(bob) 2-entailed", true, k_entails(&kappa, &rule, 2, &sm_bob)?.is_some()),
        check("sm(bob) not 1-entailed", true, k_entails(&kappa, &rule, 1, &sm_bob)?.is_none()),
        check("sm(bob) votes", 2, vote_count(&augmented, &rule, 2, &sm_bob)?),
        check("vote threshold", "2", vote_threshold(gamma, 3, 2, 1)),
        check(
            "sm(bob) voting-entailed",
            true,
            voting_entailed_literals(&augmented, &rule, 2, gamma, &sm, false)?.contains(&sm_bob),
        ),
        check(
            "rare-clique 10^6 accuracy",
            "499999/500000",
            accuracy_from_failing(1_000_000, 2, rare_clique_failing(1_000_000, 1, 2)),
        ),
        check("rare-clique 100 accuracy", Ratio::new(4851u128, 4950), clique_q.ratio()),
        check("rare-clique 100 false literals", 99, clique_false.len()),
        check("rare-clique 100 worst-case bound", 400, prop3.round()),
        check("rare-chain 100 false literals", 1, chain_false.len()),
        check(
            "friend-of-alice rewrite",
            "forall X: fr__1_alice(X) -> !sm(X)",
            eliminated.to_string().trim(),
        ),
    ])
}

pub fn run(format: Format) -> Result<ExitCode> {
    let checks = checks()?;
    let all = checks.iter().all(|c| c.pass);
    match format {
        Format::Json => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": "selftest",
                "config": {},
                "result": { "checks": checks, "pass": all },
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Text => {
            let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            for c in &checks {
                let status = if c.pass { "pass" } else { "FAIL" };
                println!("{status}  {:width$}  {}", c.name, c.actual);
            }
        }
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
