//! Closed-form error bounds: worst case for a known test accuracy, tail bounds
//! for fragment-frequency estimates, and PAC bounds for a theory selected from a
//! finite hypothesis class.
//!
//! Floors `⌊n/k⌋` are computed on integers. Probabilities are clamped to 1.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Which bound produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Prop3,
    Prop4,
    Thm7,
    Thm8,
    Thm9,
    Thm10,
    Tail1,
    Tail2,
    Tailr,
}

impl Theorem {
    pub const ALL: [Theorem; 9] = [
        Theorem::Prop3,
        Theorem::Prop4,
        Theorem::Thm7,
        Theorem::Thm8,
        Theorem::Thm9,
        Theorem::Thm10,
        Theorem::Tail1,
        Theorem::Tail2,
        Theorem::Tailr,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::Prop3 => "prop3",
            Theorem::Prop4 => "prop4",
            Theorem::Thm7 => "thm7",
            Theorem::Thm8 => "thm8",
            Theorem::Thm9 => "thm9",
            Theorem::Thm10 => "thm10",
            Theorem::Tail1 => "tail1",
            Theorem::Tail2 => "tail2",
            Theorem::Tailr => "tailr",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown theorem `{s}`")))
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// How many ground literals of the target predicate exist, for the vacuity flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiteralCount {
    /// `2·u^a`: both signs are inference targets.
    #[default]
    Signed,
    /// `u^a`.
    PositiveOnly,
}

impl LiteralCount {
    pub fn total(self, u: u64, a: u32) -> f64 {
        let base = (u as f64).powi(a as i32);
        match self {
            LiteralCount::Signed => 2.0 * base,
            LiteralCount::PositiveOnly => base,
        }
    }
}

/// Inputs of a PAC bound, echoed in its report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PacInputs {
    /// Training accuracy `Q_{Υ,k}(Φ)`; 1 for the realizable bound.
    pub q: f64,
    pub n: u64,
    pub u: u64,
    pub k: u64,
    pub a: u32,
    pub h_size: u64,
    pub delta: f64,
    pub gamma: Option<f64>,
}

/// A PAC bound value with its inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub inputs: PacInputs,
    pub value: f64,
    /// The looser second form (actual-error bound) or the per-literal fraction (voting bound).
    pub secondary: Option<f64>,
    pub literal_total: f64,
    pub vacuous: bool,
}

fn floor_div(n: u64, k: u64) -> u64 {
    n / k
}

fn check_q(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("accuracy {q} not in [0,1]")))
    }
}

fn check_pac(i: &PacInputs) -> Result<()> {
    check_q(i.q)?;
    if !(i.delta > 0.0 && i.delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {} not in (0,1)", i.delta)));
    }
    if i.h_size == 0 {
        return Err(Error::InvalidParameter("hypothesis class must be nonempty".into()));
    }
    if i.k == 0 || i.n < i.k || i.u < i.k {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= min(n,u), got k={} n={} u={}",
            i.k, i.n, i.u
        )));
    }
    if i.a as u64 > i.k {
        return Err(Error::ArityExceedsK {
            arity: i.a as usize,
            k: i.k as usize,
        });
    }
    Ok(())
}

fn report(theorem: Theorem, inputs: PacInputs, value: f64, secondary: Option<f64>, count: LiteralCount) -> BoundReport {
    let literal_total = count.total(inputs.u, inputs.a);
    BoundReport {
        theorem,
        inputs,
        value,
        secondary,
        literal_total,
        vacuous: value >= literal_total,
    }
}

/// `(1−Q)·|C|^k·k^a`: errors of k-entailment on an example where the theory has accuracy `Q`.
pub fn worst_case_k(q: f64, c: u64, k: u32, a: u32) -> Result<f64> {
    check_q(q)?;
    if a > k {
        return Err(Error::ArityExceedsK {
            arity: a as usize,
            k: k as usize,
        });
    }
    Ok((1.0 - q) * (c as f64).powi(k as i32) * (k as f64).powi(a as i32))
}

/// Voting counterpart of [`worst_case_k`]: `(1−Q)·|C|^a·k^a/γ` when
/// `γ·|C|^(k−a) ≥ 1`, otherwise the k-entailment bound.
pub fn worst_case_voting(q: f64, c: u64, k: u32, a: u32, gamma: f64) -> Result<f64> {
    let fallback = worst_case_k(q, c, k, a)?;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("gamma {gamma} not in [0,1]")));
    }
    if gamma * (c as f64).powi((k - a) as i32) >= 1.0 {
        Ok((1.0 - q) * (c as f64).powi(a as i32) * (k as f64).powi(a as i32) / gamma)
    } else {
        Ok(fallback)
    }
}

/// Tail of a training-accuracy estimate around the global accuracy:
/// `exp(−2⌊n/k⌋ε²)`, doubled when two-sided.
pub fn tail_one_sample(n: u64, k: u64, eps: f64, two_sided: bool) -> f64 {
    let m = floor_div(n, k) as f64;
    let factor = if two_sided { 2.0 } else { 1.0 };
    (factor * (-2.0 * m * eps * eps).exp()).min(1.0)
}

/// Tail of the difference of two estimates:
/// `exp(−2ε² / (1/⌊n/k⌋ + 1/⌊u/k⌋))`, doubled when two-sided.
pub fn tail_two_sample(n: u64, u: u64, k: u64, eps: f64, two_sided: bool) -> f64 {
    let (a, b) = (floor_div(n, k) as f64, floor_div(u, k) as f64);
    let factor = if two_sided { 2.0 } else { 1.0 };
    (factor * (-2.0 * eps * eps / (1.0 / a + 1.0 / b)).exp()).min(1.0)
}

/// Probability that a formula with global accuracy at most `1−ε` has training accuracy 1
/// (equivalently: estimate 0 for a property of probability at least `ε`): `exp(−⌊n/k⌋ε)`.
pub fn tail_realizable(n: u64, k: u64, eps: f64) -> f64 {
    (-(floor_div(n, k) as f64) * eps).exp().min(1.0)
}

/// Bound on the expected number of errors for theories with training accuracy 1:
/// `(ln|H| + ln(1/δ))/⌊n/k⌋ · u^k·k^a`.
pub fn pac_realizable_expected(i: PacInputs, count: LiteralCount) -> Result<BoundReport> {
    check_pac(&i)?;
    let eps = ((i.h_size as f64).ln() + (1.0 / i.delta).ln()) / floor_div(i.n, i.k) as f64;
    let value = eps * scale_k(&i);
    Ok(report(Theorem::Thm7, i, value, None, count))
}

fn scale_k(i: &PacInputs) -> f64 {
    (i.u as f64).powi(i.k as i32) * (i.k as f64).powi(i.a as i32)
}

/// Bound on the expected number of errors:
/// `(1−Q + sqrt(ln(|H|/δ)/(2⌊n/k⌋)))·u^k·k^a`.
pub fn pac_expected(i: PacInputs, count: LiteralCount) -> Result<BoundReport> {
    check_pac(&i)?;
    let m = floor_div(i.n, i.k) as f64;
    let slack = ((i.h_size as f64 / i.delta).ln() / (2.0 * m)).sqrt();
    let value = (1.0 - i.q + slack) * scale_k(&i);
    Ok(report(Theorem::Thm8, i, value, None, count))
}

/// Deviation term of the two-sample union bound, first (tighter) form.
pub fn pac_actual_slack(n: u64, u: u64, k: u64, h_size: u64, delta: f64) -> f64 {
    let (a, b) = (floor_div(n, k) as f64, floor_div(u, k) as f64);
    ((a + b) * (2.0 * h_size as f64 / delta).ln() / (2.0 * a * b)).sqrt()
}

/// Deviation term with `min(⌊n/k⌋, ⌊u/k⌋)`, shared by the second form and the voting bound.
pub fn pac_min_slack(n: u64, u: u64, k: u64, h_size: u64, delta: f64) -> f64 {
    let m = floor_div(n, k).min(floor_div(u, k)) as f64;
    ((2.0 * h_size as f64 / delta).ln() / m).sqrt()
}

/// Bound on the actual number of errors. `value` is the first form,
/// `secondary` the second, looser one.
pub fn pac_actual(i: PacInputs, count: LiteralCount) -> Result<BoundReport> {
    check_pac(&i)?;
    let form1 = (1.0 - i.q + pac_actual_slack(i.n, i.u, i.k, i.h_size, i.delta)) * scale_k(&i);
    let form2 = (1.0 - i.q + pac_min_slack(i.n, i.u, i.k, i.h_size, i.delta)) * scale_k(&i);
    debug_assert!(form1 <= form2 * (1.0 + 1e-12));
    Ok(report(Theorem::Thm9, i, form1, Some(form2), count))
}

/// Bound on the actual number of voting errors,
/// `(1−Q + sqrt(ln(2|H|/δ)/min(⌊u/k⌋,⌊n/k⌋)))·u^a·k^a/γ`.
/// `secondary` is the bound on the fraction `|F|/u^a`.
pub fn pac_voting(i: PacInputs, count: LiteralCount) -> Result<BoundReport> {
    check_pac(&i)?;
    let gamma = match i.gamma {
        Some(g) if g > 0.0 && g <= 1.0 => g,
        _ => {
            return Err(Error::InvalidParameter(
                "voting bound needs gamma in (0,1]".into(),
            ))
        }
    };
    let fraction = (1.0 - i.q + pac_min_slack(i.n, i.u, i.k, i.h_size, i.delta))
        * (i.k as f64).powi(i.a as i32)
        / gamma;
    let value = fraction * (i.u as f64).powi(i.a as i32);
    Ok(report(Theorem::Thm10, i, value, Some(fraction), count))
}

/// Which tail to invert.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    OneSample { two_sided: bool },
    TwoSample { u: u64, two_sided: bool },
    Realizable,
}

/// The smallest `ε` whose tail bound is at most `delta`.
pub fn invert_tail(n: u64, k: u64, delta: f64, tail: Tail) -> f64 {
    let m = floor_div(n, k) as f64;
    let factor = |two_sided: bool| if two_sided { 2.0 } else { 1.0 };
    match tail {
        Tail::OneSample { two_sided } => ((factor(two_sided) / delta).ln() / (2.0 * m)).sqrt(),
        Tail::TwoSample { u, two_sided } => {
            let b = floor_div(u, k) as f64;
            ((factor(two_sided) / delta).ln() * (1.0 / m + 1.0 / b) / 2.0).sqrt()
        }
        Tail::Realizable => (1.0 / delta).ln() / m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn inputs(q: f64, n: u64, u: u64, k: u64, a: u32, h: u64, delta: f64) -> PacInputs {
        PacInputs {
            q,
            n,
            u,
            k,
            a,
            h_size: h,
            delta,
            gamma: None,
        }
    }

    #[test]
    fn worst_case_values() {
        assert!(close(worst_case_k(0.999998, 1_000_000, 2, 1).unwrap(), 4e6, 1e-9));
        assert_eq!(worst_case_k(1.0, 50, 2, 1).unwrap(), 0.0);
        let q = 1.0 - 99.0 / 4950.0;
        assert!(close(worst_case_k(q, 100, 2, 1).unwrap(), 400.0, 1e-12));
        assert!(close(worst_case_voting(q, 100, 2, 1, 0.05).unwrap(), 80.0, 1e-12));
        // γ·C^(k−a) = 0.005 < 1 falls back.
        assert_eq!(
            worst_case_voting(q, 100, 2, 2, 0.005).unwrap(),
            worst_case_k(q, 100, 2, 2).unwrap()
        );
        assert!(worst_case_k(0.5, 10, 1, 2).is_err());
    }

    #[test]
    fn tails() {
        assert_eq!(tail_one_sample(200, 2, 0.0, true), 1.0);
        assert!(close(tail_one_sample(200, 2, 0.1, true), 2.0 * (-2.0f64).exp(), 1e-12));
        assert!(close(tail_one_sample(200, 2, 0.3, false), (-18.0f64).exp(), 1e-12));
        assert!(close(tail_two_sample(200, 200, 2, 0.1, true), 2.0 * (-1.0f64).exp(), 1e-12));
        assert!(close(tail_two_sample(200, 2_000_000, 2, 0.1, true), 2.0 * (-2.0f64).exp(), 1e-4));
        assert!(close(tail_realizable(200, 2, 0.05), (-5.0f64).exp(), 1e-12));
        assert!(tail_realizable(200, 2, 0.1) < tail_one_sample(200, 2, 0.1, true));
    }

    #[test]
    fn pac_values() {
        let r = pac_realizable_expected(inputs(1.0, 100, 10, 2, 2, 1, 0.05), LiteralCount::Signed).unwrap();
        assert!(close(r.value, 20f64.ln() / 50.0 * 400.0, 1e-12));
        assert!(!r.vacuous);
        let r = pac_realizable_expected(inputs(1.0, 100, 100, 2, 1, 1, 0.05), LiteralCount::Signed).unwrap();
        assert!(close(r.value, 1198.29, 1e-4));
        assert!(r.vacuous);

        let r = pac_expected(inputs(0.98, 5000, 10, 2, 2, 8, 0.05), LiteralCount::Signed).unwrap();
        assert!(close(r.value, 20.75, 1e-3));

        let r = pac_actual(inputs(1.0, 5000, 5000, 2, 2, 1, 0.05), LiteralCount::Signed).unwrap();
        assert!(close(r.value, (40f64.ln() / 2500.0).sqrt() * 400.0 * 5000.0 * 5000.0 / 100.0, 1e-12));
        assert!(r.value <= r.secondary.unwrap());
    }

    #[test]
    fn voting_identities() {
        let mut i = inputs(0.9, 300, 100, 2, 1, 4, 0.05);
        i.gamma = Some(0.5);
        let v = pac_voting(i, LiteralCount::Signed).unwrap();
        let form2 = pac_actual(i, LiteralCount::Signed).unwrap().secondary.unwrap();
        assert!(close(v.value / form2, 1.0 / (0.5 * 100.0), 1e-12));
        assert!(close(v.secondary.unwrap() * 100.0, v.value, 1e-12));

        let mut j = inputs(0.9, 300, 100, 2, 2, 4, 0.05);
        j.gamma = Some(1.0);
        assert!(close(
            pac_voting(j, LiteralCount::Signed).unwrap().value,
            pac_actual(j, LiteralCount::Signed).unwrap().secondary.unwrap(),
            1e-12
        ));
        j.gamma = None;
        assert!(pac_voting(j, LiteralCount::Signed).is_err());
    }

    #[test]
    fn inversion() {
        let e = invert_tail(200, 2, 0.05, Tail::OneSample { two_sided: true });
        assert!(close(e, (40f64.ln() / 200.0).sqrt(), 1e-12));
        assert!(tail_one_sample(200, 2, e, true) <= 0.05 + 1e-12);
        let e = invert_tail(200, 2, 0.05, Tail::Realizable);
        assert!(close(e, 20f64.ln() / 100.0, 1e-12));
        let e = invert_tail(200, 2, 0.05, Tail::TwoSample { u: 60, two_sided: true });
        assert!(tail_two_sample(200, 60, 2, e, true) <= 0.05 + 1e-12);
    }

    #[test]
    fn rejects_bad_delta() {
        assert!(pac_expected(inputs(1.0, 10, 10, 2, 1, 1, 1.0), LiteralCount::Signed).is_err());
        assert!(pac_expected(inputs(1.0, 10, 10, 2, 1, 0, 0.5), LiteralCount::Signed).is_err());
    }
}
