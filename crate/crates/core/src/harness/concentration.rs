//! Monte Carlo check of the tail bounds for fragment-frequency estimates.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{tail_one_sample, tail_realizable, tail_two_sample};
use crate::error::{Error, Result};
use crate::example::{ConstId, Example};
use crate::fragments::{count_satisfying, q_exact_with_budget, q_monte_carlo, DEFAULT_EXACT_BUDGET};
use crate::harness::learning::sample_domains;
use crate::logic::{CompiledTheory, Theory};
use crate::sampling::{binomial, rng_for};

/// Draws used for the reference accuracy when exact enumeration is over budget.
pub const REFERENCE_DRAWS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationConfig {
    pub k: usize,
    pub n: usize,
    /// Test size; enables the two-sample rows.
    pub u: Option<usize>,
    pub epsilons: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
}

/// Empirical tail frequencies at one deviation next to their bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub epsilon: f64,
    /// Fraction of trials with `Â − A ≥ ε`.
    pub upper: f64,
    /// Fraction with `A − Â ≥ ε`.
    pub lower: f64,
    /// Fraction with `|Â − A| ≥ ε`.
    pub two_sided: f64,
    pub bound_one_sided: f64,
    pub bound_two_sided: f64,
}

/// `P[Â = 0]` against `exp(−⌊n/k⌋ε)`, listed for deviations `ε ≤ A`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizableRow {
    pub epsilon: f64,
    pub zero_rate: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationTable {
    pub config: ConcentrationConfig,
    /// The global accuracy `A`.
    pub reference: f64,
    pub reference_exact: bool,
    pub one_sample: Vec<TailRow>,
    /// Training estimate against test estimate, when a test size is configured.
    pub two_sample: Vec<TailRow>,
    pub realizable: Vec<RealizableRow>,
}

/// A bound exceeded beyond the noise allowance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailViolation {
    pub check: String,
    pub epsilon: f64,
    pub empirical: f64,
    pub bound: f64,
    pub allowance: f64,
}

impl ConcentrationTable {
    /// Rows whose empirical frequency exceeds the bound by more than `z` binomial
    /// standard errors (computed at the bound's probability).
    pub fn violations(&self, z: f64) -> Vec<TailViolation> {
        let t = self.config.trials as f64;
        let slack = |p: f64| z * (p * (1.0 - p) / t).sqrt();
        let mut out = Vec::new();
        let mut check = |name: &str, eps: f64, empirical: f64, bound: f64| {
            let allowance = slack(bound.min(1.0));
            if empirical > bound + allowance {
                out.push(TailViolation {
                    check: name.to_string(),
                    epsilon: eps,
                    empirical,
                    bound,
                    allowance,
                });
            }
        };
        for (label, rows) in [("one-sample", &self.one_sample), ("two-sample", &self.two_sample)] {
            for r in rows {
                check(&format!("{label} upper"), r.epsilon, r.upper, r.bound_one_sided);
                check(&format!("{label} lower"), r.epsilon, r.lower, r.bound_one_sided);
                check(&format!("{label} two-sided"), r.epsilon, r.two_sided, r.bound_two_sided);
            }
        }
        for r in &self.realizable {
            check("realizable", r.epsilon, r.zero_rate, r.bound);
        }
        out
    }
}

fn rows(estimates: &[(f64, f64)], epsilons: &[f64], bound: impl Fn(f64, bool) -> f64) -> Vec<TailRow> {
    let t = estimates.len() as f64;
    // Deviations are compared with a small tolerance so that exact ties such as
    // ε = A are counted despite rounding.
    let tol = 1e-12;
    epsilons
        .iter()
        .map(|&eps| {
            let count = |f: &dyn Fn(f64) -> bool| estimates.iter().filter(|(x, y)| f(x - y)).count() as f64 / t;
            TailRow {
                epsilon: eps,
                upper: count(&|d| d >= eps - tol),
                lower: count(&|d| -d >= eps - tol),
                two_sided: count(&|d| d.abs() >= eps - tol),
                bound_one_sided: bound(eps, false),
                bound_two_sided: bound(eps, true),
            }
        })
        .collect()
}

/// Samples training (and optionally test) domains `trials` times and tabulates
/// how often the estimates deviate from the global accuracy, next to the bounds.
pub fn validate_concentration(aleph: &Example, theory: &Theory, cfg: &ConcentrationConfig) -> Result<ConcentrationTable> {
    let k = cfg.k;
    if cfg.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if k == 0 || cfg.n < k || cfg.u.is_some_and(|u| u < k) {
        return Err(Error::InvalidParameter("need 1 <= k <= n and k <= u".into()));
    }
    let (reference, reference_exact) = match q_exact_with_budget(aleph, k, theory, DEFAULT_EXACT_BUDGET) {
        Ok(q) => (q.value, true),
        Err(Error::BudgetExceeded { .. }) => {
            (q_monte_carlo(aleph, k, theory, REFERENCE_DRAWS, cfg.seed ^ 0x5eed)?.value, false)
        }
        Err(e) => return Err(e),
    };
    let compiled = CompiledTheory::new(aleph, theory)?;
    let isolated = aleph.isolated_mask();
    let estimate = |ids: &[ConstId]| {
        count_satisfying(aleph, &compiled, k, ids, &isolated) as f64
            / binomial(ids.len() as u64, k as u64) as f64
    };
    let samples: Vec<(f64, Option<f64>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(cfg.seed, t);
            let (train, test) = sample_domains(&mut rng, aleph.domain_size(), cfg.n, cfg.u.unwrap_or(0))?;
            Ok((estimate(&train), cfg.u.map(|_| estimate(&test))))
        })
        .collect::<Result<_>>()?;

    let one: Vec<(f64, f64)> = samples.iter().map(|&(a, _)| (a, reference)).collect();
    let one_sample = rows(&one, &cfg.epsilons, |e, two| tail_one_sample(cfg.n as u64, k as u64, e, two));
    let two_sample = match cfg.u {
        Some(u) => {
            let pairs: Vec<(f64, f64)> = samples.iter().map(|&(a, b)| (a, b.unwrap())).collect();
            rows(&pairs, &cfg.epsilons, |e, two| {
                tail_two_sample(cfg.n as u64, u as u64, k as u64, e, two)
            })
        }
        None => Vec::new(),
    };

    let mut realizable_eps: Vec<f64> = cfg.epsilons.iter().copied().filter(|&e| e <= reference).collect();
    if reference > 0.0 && !realizable_eps.contains(&reference) {
        realizable_eps.push(reference);
    }
    let zero_rate = samples.iter().filter(|(a, _)| *a == 0.0).count() as f64 / cfg.trials as f64;
    let realizable = realizable_eps
        .into_iter()
        .map(|eps| RealizableRow {
            epsilon: eps,
            zero_rate,
            bound: tail_realizable(cfg.n as u64, k as u64, eps),
        })
        .collect();

    Ok(ConcentrationTable {
        config: cfg.clone(),
        reference,
        reference_exact,
        one_sample,
        two_sample,
        realizable,
    })
}
