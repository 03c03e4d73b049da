//! PAC experiments: sample training and test examples, select a theory, count
//! entailment errors on the masked test example and compare with the bounds.

use num_rational::Ratio;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{
    pac_actual, pac_expected, pac_realizable_expected, pac_voting, worst_case_k, worst_case_voting,
    LiteralCount, PacInputs,
};
use crate::error::{Error, Result};
use crate::example::{ConstId, Example};
use crate::fragments::{count_satisfying, q_exact, q_exact_with_budget, q_monte_carlo, DEFAULT_EXACT_BUDGET};
use crate::harness::concentration::REFERENCE_DRAWS;
use crate::harness::learning::sample_domains;
use crate::logic::{CompiledTheory, Predicate, Theory};
use crate::masking::{apply_mask, MaskedExample, Masker};
use crate::reasoner::{k_and_voting_literals, k_entailed_literals, EntailmentResult, Gamma};
use crate::sampling::{binomial, derive_seed, rng_for};

/// How test examples are masked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MaskKind {
    Identity,
    /// All true positive literals: the adversarial evidence.
    PositiveOnly,
    RandomDrop { keep: f64 },
}

impl MaskKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(MaskKind::Identity),
            "positive-only" => Ok(MaskKind::PositiveOnly),
            _ => match s.strip_prefix("random-drop:") {
                Some(p) => p
                    .parse()
                    .ok()
                    .filter(|p| (0.0..=1.0).contains(p))
                    .map(|keep| MaskKind::RandomDrop { keep })
                    .ok_or_else(|| Error::InvalidParameter(format!("bad keep probability in `{s}`"))),
                None => Err(Error::InvalidParameter(format!("unknown mask kind `{s}`"))),
            },
        }
    }

    pub fn masker(self, example: &Example, seed: u64) -> Masker {
        match self {
            MaskKind::Identity => Masker::Identity,
            MaskKind::PositiveOnly => {
                Masker::PositiveOnly(example.predicates().iter().map(|p| p.name.clone()).collect())
            }
            MaskKind::RandomDrop { keep } => Masker::RandomDrop { p: keep, seed },
        }
    }
}

impl std::fmt::Display for MaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MaskKind::Identity => f.write_str("identity"),
            MaskKind::PositiveOnly => f.write_str("positive-only"),
            MaskKind::RandomDrop { keep } => write!(f, "random-drop:{keep}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PacConfig {
    pub k: usize,
    pub n: usize,
    pub u: usize,
    #[serde(serialize_with = "serialize_gamma")]
    pub gamma: Option<Gamma>,
    pub mask: MaskKind,
    pub target: Predicate,
    pub positive_only: bool,
    pub trials: u64,
    pub delta: f64,
    pub seed: u64,
}

fn serialize_gamma<S: serde::Serializer>(g: &Option<Gamma>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match g {
        Some(g) => s.serialize_some(&g.to_string()),
        None => s.serialize_none(),
    }
}

fn ratio_str<S: serde::Serializer>(r: &Ratio<u128>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ratio_strs<S: serde::Serializer>(rs: &[Ratio<u128>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(|r| r.to_string()))
}

pub(crate) fn gamma_f64(g: Gamma) -> f64 {
    *g.numer() as f64 / *g.denom() as f64
}

impl PacConfig {
    fn literal_count(&self) -> LiteralCount {
        if self.positive_only {
            LiteralCount::PositiveOnly
        } else {
            LiteralCount::Signed
        }
    }

    fn inputs(&self, q_train: f64, h_size: usize) -> PacInputs {
        PacInputs {
            q: q_train,
            n: self.n as u64,
            u: self.u as u64,
            k: self.k as u64,
            a: self.target.arity as u32,
            h_size: h_size as u64,
            delta: self.delta,
            gamma: self.gamma.map(gamma_f64),
        }
    }

    fn validate(&self, aleph: &Example, hypotheses: &[Theory]) -> Result<()> {
        if hypotheses.is_empty() {
            return Err(Error::InvalidParameter("hypothesis class is empty".into()));
        }
        if let Some(c) = hypotheses.iter().flat_map(|t| t.constants()).next() {
            return Err(Error::TheoryHasConstants(c));
        }
        if self.k == 0 || self.n < self.k || self.u < self.k {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= k <= min(n,u), got k={} n={} u={}",
                self.k, self.n, self.u
            )));
        }
        if self.n.max(self.u) > aleph.domain_size() {
            return Err(Error::FragmentTooLarge {
                k: self.n.max(self.u),
                domain: aleph.domain_size(),
            });
        }
        if self.target.arity > self.k {
            return Err(Error::ArityExceedsK {
                arity: self.target.arity,
                k: self.k,
            });
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta {} not in (0,1)", self.delta)));
        }
        Ok(())
    }
}

/// Per-theory quantities of one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryOutcome {
    #[serde(serialize_with = "ratio_str")]
    pub q_train: Ratio<u128>,
    #[serde(serialize_with = "ratio_str")]
    pub q_test: Ratio<u128>,
    pub q_global: f64,
    /// `|F|` under k-entailment.
    pub errors_k: usize,
    /// `|F|` under voting, when a voting parameter is configured.
    pub errors_vote: Option<usize>,
    pub prop3: f64,
    pub prop4: Option<f64>,
    /// Only for theories with training accuracy 1.
    pub thm7: Option<f64>,
    pub thm8: f64,
    pub thm9: f64,
    pub thm9_form2: f64,
    pub thm10: Option<f64>,
    pub thm10_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// Digest of the training domain.
    pub train_digest: String,
    pub test_domain: Vec<String>,
    pub selected: usize,
    pub outcomes: Vec<TheoryOutcome>,
    pub prop3_violation: bool,
    pub prop4_violation: Option<bool>,
    pub thm9_violation: bool,
    pub thm10_violation: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PacSummary {
    pub trials: u64,
    pub hypotheses: usize,
    pub literal_total: f64,
    pub q_global: Vec<f64>,
    pub q_global_exact: bool,
    pub selected_counts: Vec<u64>,
    pub mean_errors_k: Vec<f64>,
    pub mean_errors_vote: Option<Vec<f64>>,
    pub prop3_violation_rate: f64,
    pub prop4_violation_rate: Option<f64>,
    pub thm9_violation_rate: f64,
    pub thm10_violation_rate: Option<f64>,
    /// Fraction of trials whose realizable expected-error bound lies below the
    /// trial-mean error count, for some theory with training accuracy 1.
    pub thm7_mean_violation_rate: f64,
    /// Same for the expected-error bound.
    pub thm8_mean_violation_rate: f64,
    /// Allowed violation rate: `δ + 3·sqrt(δ(1−δ)/trials)`.
    pub allowed_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PacRun {
    pub config: PacConfig,
    pub records: Vec<TrialRecord>,
    pub summary: PacSummary,
}

/// Index and training accuracy of the most accurate theory; ties go to the lowest index.
pub fn select_best_theory(hypotheses: &[Theory], train: &Example, k: usize) -> Result<(usize, Ratio<u128>)> {
    if hypotheses.is_empty() {
        return Err(Error::InvalidParameter("hypothesis class is empty".into()));
    }
    let qs = hypotheses
        .iter()
        .map(|t| q_exact(train, k, t).map(|q| q.ratio()))
        .collect::<Result<Vec<_>>>()?;
    Ok(argmax(&qs))
}

fn argmax(qs: &[Ratio<u128>]) -> (usize, Ratio<u128>) {
    let mut best = 0;
    for (i, q) in qs.iter().enumerate() {
        if *q > qs[best] {
            best = i;
        }
    }
    (best, qs[best])
}

fn fnv(items: &[String]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for s in items {
        for b in s.bytes().chain(std::iter::once(b' ')) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

/// Global accuracies, exact when within budget.
fn global_accuracies(aleph: &Example, hypotheses: &[Theory], k: usize, seed: u64) -> Result<(Vec<f64>, bool)> {
    let mut exact = true;
    let mut out = Vec::new();
    for t in hypotheses {
        match q_exact_with_budget(aleph, k, t, DEFAULT_EXACT_BUDGET) {
            Ok(q) => out.push(q.value),
            Err(Error::BudgetExceeded { .. }) => {
                exact = false;
                out.push(q_monte_carlo(aleph, k, t, REFERENCE_DRAWS, seed)?.value);
            }
            Err(e) => return Err(e),
        }
    }
    Ok((out, exact))
}

/// Shared read-only state of an experiment.
struct Setup<'a> {
    aleph: &'a Example,
    hypotheses: &'a [Theory],
    compiled: Vec<CompiledTheory>,
    isolated: Vec<bool>,
    cfg: &'a PacConfig,
}

impl Setup<'_> {
    fn new<'a>(aleph: &'a Example, hypotheses: &'a [Theory], cfg: &'a PacConfig) -> Result<Setup<'a>> {
        cfg.validate(aleph, hypotheses)?;
        Ok(Setup {
            aleph,
            hypotheses,
            compiled: hypotheses
                .iter()
                .map(|t| CompiledTheory::new(aleph, t))
                .collect::<Result<_>>()?,
            isolated: aleph.isolated_mask(),
            cfg,
        })
    }

    fn accuracies(&self, ids: &[ConstId]) -> Vec<Ratio<u128>> {
        let total = binomial(ids.len() as u64, self.cfg.k as u64);
        self.compiled
            .iter()
            .map(|c| Ratio::new(count_satisfying(self.aleph, c, self.cfg.k, ids, &self.isolated), total))
            .collect()
    }

    /// Error counts of every theory on a masked test example.
    fn errors(&self, test: &Example, masked: &MaskedExample) -> Result<Vec<(usize, Option<usize>)>> {
        let cfg = self.cfg;
        let count = |r: &EntailmentResult| {
            r.literals
                .iter()
                .filter(|d| test.holds(&d.literal.atom) != d.literal.positive)
                .count()
        };
        self.hypotheses
            .iter()
            .map(|t| match cfg.gamma {
                Some(g) => {
                    let (k, v) = k_and_voting_literals(masked, t, cfg.k, g, &cfg.target, cfg.positive_only)?;
                    Ok((count(&k), Some(count(&v))))
                }
                None => {
                    let k = k_entailed_literals(masked, t, cfg.k, &cfg.target, cfg.positive_only)?;
                    Ok((count(&k), None))
                }
            })
            .collect()
    }

    fn trial(&self, trial: u64, q_global: &[f64]) -> Result<TrialRecord> {
        let cfg = self.cfg;
        let mut rng = rng_for(cfg.seed, trial);
        let (train_ids, test_ids) = sample_domains(&mut rng, self.aleph.domain_size(), cfg.n, cfg.u)?;
        let mask_seed = rng.next_u64();
        let q_train = self.accuracies(&train_ids);
        let q_test = self.accuracies(&test_ids);
        let (selected, _) = argmax(&q_train);

        let test = self.aleph.restrict_ids(&test_ids);
        let masked = apply_mask(&cfg.mask.masker(&test, mask_seed), &test)?;
        let errors = self.errors(&test, &masked)?;

        let h = self.hypotheses.len();
        let count = cfg.literal_count();
        let a = cfg.target.arity as u32;
        let mut outcomes = Vec::with_capacity(h);
        for i in 0..h {
            let qt = ratio_f64(q_train[i]);
            let qs = ratio_f64(q_test[i]);
            let inputs = cfg.inputs(qt, h);
            let actual = pac_actual(inputs, count)?;
            let voting = match cfg.gamma {
                Some(g) if *g.numer() > 0 => Some(pac_voting(inputs, count)?),
                _ => None,
            };
            outcomes.push(TheoryOutcome {
                q_train: q_train[i],
                q_test: q_test[i],
                q_global: q_global[i],
                errors_k: errors[i].0,
                errors_vote: errors[i].1,
                prop3: worst_case_k(qs, cfg.u as u64, cfg.k as u32, a)?,
                prop4: match cfg.gamma {
                    Some(g) => Some(worst_case_voting(qs, cfg.u as u64, cfg.k as u32, a, gamma_f64(g))?),
                    None => None,
                },
                thm7: if *q_train[i].numer() == *q_train[i].denom() {
                    Some(pac_realizable_expected(inputs, count)?.value)
                } else {
                    None
                },
                thm8: pac_expected(inputs, count)?.value,
                thm9: actual.value,
                thm9_form2: actual.secondary.unwrap(),
                thm10: voting.as_ref().map(|r| r.value),
                thm10_fraction: voting.as_ref().and_then(|r| r.secondary),
            });
        }
        // Bounds computed in floating point get a relative tolerance.
        let exceeds = |e: usize, b: f64| e as f64 > b * (1.0 + 1e-9) + 1e-9;
        let test_domain = test.domain().to_vec();
        Ok(TrialRecord {
            trial,
            train_digest: fnv(&train_ids.iter().map(|&c| self.aleph.constant(c).to_string()).collect::<Vec<_>>()),
            test_domain,
            selected,
            prop3_violation: outcomes.iter().any(|o| exceeds(o.errors_k, o.prop3)),
            prop4_violation: cfg
                .gamma
                .map(|_| outcomes.iter().any(|o| exceeds(o.errors_vote.unwrap(), o.prop4.unwrap()))),
            thm9_violation: outcomes.iter().any(|o| exceeds(o.errors_k, o.thm9)),
            thm10_violation: outcomes[0]
                .thm10
                .map(|_| outcomes.iter().any(|o| exceeds(o.errors_vote.unwrap(), o.thm10.unwrap()))),
            outcomes,
        })
    }
}

pub(crate) fn ratio_f64(r: Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn rate(flags: impl Iterator<Item = bool>, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        flags.filter(|&f| f).count() as f64 / total as f64
    }
}

fn mean(values: impl Iterator<Item = usize>, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        values.sum::<usize>() as f64 / total as f64
    }
}

/// Runs `trials` independent trials. Trial `t` samples from stream `t` of the
/// seed, so results do not depend on scheduling.
pub fn run_pac_experiment(aleph: &Example, hypotheses: &[Theory], cfg: &PacConfig) -> Result<PacRun> {
    let setup = Setup::new(aleph, hypotheses, cfg)?;
    let (q_global, q_global_exact) = global_accuracies(aleph, hypotheses, cfg.k, derive_seed(cfg.seed, u64::MAX))?;
    let records: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| setup.trial(t, &q_global))
        .collect::<Result<_>>()?;

    let h = hypotheses.len();
    let t = cfg.trials;
    let mean_errors_k: Vec<f64> = (0..h)
        .map(|i| mean(records.iter().map(|r| r.outcomes[i].errors_k), t))
        .collect();
    let mean_errors_vote = cfg.gamma.map(|_| {
        (0..h)
            .map(|i| mean(records.iter().map(|r| r.outcomes[i].errors_vote.unwrap()), t))
            .collect::<Vec<_>>()
    });
    let mut selected_counts = vec![0u64; h];
    for r in &records {
        selected_counts[r.selected] += 1;
    }
    let has_vote_bound = records.first().is_some_and(|r| r.thm10_violation.is_some());
    let summary = PacSummary {
        trials: t,
        hypotheses: h,
        literal_total: cfg.literal_count().total(cfg.u as u64, cfg.target.arity as u32),
        q_global,
        q_global_exact,
        selected_counts,
        prop3_violation_rate: rate(records.iter().map(|r| r.prop3_violation), t),
        prop4_violation_rate: cfg
            .gamma
            .map(|_| rate(records.iter().map(|r| r.prop4_violation.unwrap()), t)),
        thm9_violation_rate: rate(records.iter().map(|r| r.thm9_violation), t),
        thm10_violation_rate: has_vote_bound
            .then(|| rate(records.iter().map(|r| r.thm10_violation.unwrap()), t)),
        thm7_mean_violation_rate: rate(
            records.iter().map(|r| {
                r.outcomes
                    .iter()
                    .zip(&mean_errors_k)
                    .any(|(o, &m)| o.thm7.is_some_and(|b| m > b))
            }),
            t,
        ),
        thm8_mean_violation_rate: rate(
            records
                .iter()
                .map(|r| r.outcomes.iter().zip(&mean_errors_k).any(|(o, &m)| m > o.thm8)),
            t,
        ),
        allowed_rate: cfg.delta + 3.0 * (cfg.delta * (1.0 - cfg.delta) / t.max(1) as f64).sqrt(),
        mean_errors_k,
        mean_errors_vote,
    };
    Ok(PacRun {
        config: cfg.clone(),
        records,
        summary,
    })
}

/// One outer repetition of the expected-error protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuterRepetition {
    #[serde(serialize_with = "ratio_strs")]
    pub q_train: Vec<Ratio<u128>>,
    /// Mean `|F|` over the inner test draws, per theory.
    pub mean_errors: Vec<f64>,
    pub thm7: Vec<Option<f64>>,
    pub thm8: Vec<f64>,
    pub thm7_holds: bool,
    pub thm8_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedErrorReport {
    pub outer: u64,
    pub inner: u64,
    pub repetitions: Vec<OuterRepetition>,
    pub thm7_pass_rate: f64,
    pub thm8_pass_rate: f64,
    /// Required pass rate: `1 − δ − 3·sqrt(δ(1−δ)/outer)`.
    pub required_rate: f64,
}

impl ExpectedErrorReport {
    pub fn passes(&self) -> bool {
        self.thm7_pass_rate >= self.required_rate && self.thm8_pass_rate >= self.required_rate
    }
}

/// Checks the expected-error bounds with two nested levels of sampling: each
/// outer repetition draws a training domain and fixes the bounds; its inner
/// draws of test domains estimate the expected number of errors.
pub fn run_expected_error_protocol(
    aleph: &Example,
    hypotheses: &[Theory],
    cfg: &PacConfig,
    outer: u64,
    inner: u64,
) -> Result<ExpectedErrorReport> {
    if outer == 0 || inner == 0 {
        return Err(Error::InvalidParameter("outer and inner counts must be positive".into()));
    }
    let setup = Setup::new(aleph, hypotheses, cfg)?;
    let h = hypotheses.len();
    let count = cfg.literal_count();
    let repetitions: Vec<OuterRepetition> = (0..outer)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(cfg.seed, r);
            let (train_ids, _) = sample_domains(&mut rng, aleph.domain_size(), cfg.n, 0)?;
            let q_train = setup.accuracies(&train_ids);
            let inner_seed = derive_seed(cfg.seed, r);
            let mut totals = vec![0usize; h];
            for j in 0..inner {
                let mut rng = rng_for(inner_seed, j);
                let (_, test_ids) = sample_domains(&mut rng, aleph.domain_size(), 0, cfg.u)?;
                let mask_seed = rng.next_u64();
                let test = aleph.restrict_ids(&test_ids);
                let masked = apply_mask(&cfg.mask.masker(&test, mask_seed), &test)?;
                let k_only = PacConfig { gamma: None, ..cfg.clone() };
                let errs = Setup { cfg: &k_only, ..setup.shallow() }.errors(&test, &masked)?;
                for (t, e) in totals.iter_mut().zip(errs) {
                    *t += e.0;
                }
            }
            let mean_errors: Vec<f64> = totals.iter().map(|&t| t as f64 / inner as f64).collect();
            let mut thm7 = Vec::with_capacity(h);
            let mut thm8 = Vec::with_capacity(h);
            for q in &q_train {
                let inputs = cfg.inputs(ratio_f64(*q), h);
                thm7.push(if q.numer() == q.denom() {
                    Some(pac_realizable_expected(inputs, count)?.value)
                } else {
                    None
                });
                thm8.push(pac_expected(inputs, count)?.value);
            }
            Ok(OuterRepetition {
                thm7_holds: mean_errors.iter().zip(&thm7).all(|(m, b)| b.map_or(true, |b| *m <= b)),
                thm8_holds: mean_errors.iter().zip(&thm8).all(|(m, b)| m <= b),
                q_train,
                mean_errors,
                thm7,
                thm8,
            })
        })
        .collect::<Result<_>>()?;
    let d = cfg.delta;
    Ok(ExpectedErrorReport {
        outer,
        inner,
        thm7_pass_rate: rate(repetitions.iter().map(|r| r.thm7_holds), outer),
        thm8_pass_rate: rate(repetitions.iter().map(|r| r.thm8_holds), outer),
        required_rate: 1.0 - d - 3.0 * (d * (1.0 - d) / outer as f64).sqrt(),
        repetitions,
    })
}

impl<'a> Setup<'a> {
    fn shallow(&self) -> Setup<'a> {
        Setup {
            aleph: self.aleph,
            hypotheses: self.hypotheses,
            compiled: Vec::new(),
            isolated: Vec::new(),
            cfg: self.cfg,
        }
    }
}
