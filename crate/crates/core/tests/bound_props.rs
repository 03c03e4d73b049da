//! Monotonicity and range properties of the bound calculators.

use kentail::bounds::{
    invert_tail, pac_actual, pac_expected, pac_realizable_expected, pac_voting, tail_one_sample, tail_realizable,
    tail_two_sample, worst_case_k, LiteralCount, PacInputs, Tail,
};
use proptest::prelude::*;

fn inputs(q: f64, n: u64, u: u64, k: u64, h: u64, delta: f64) -> PacInputs {
    PacInputs {
        q,
        n,
        u,
        k,
        a: 1,
        h_size: h,
        delta,
        gamma: Some(0.1),
    }
}

proptest! {
    #[test]
    fn tails_are_probabilities_decreasing_in_eps(
        n in 1u64..5000, u in 1u64..5000, k in 1u64..4, e1 in 0.0f64..1.0, e2 in 0.0f64..1.0,
    ) {
        prop_assume!(n >= k && u >= k);
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        for two in [false, true] {
            let (a, b) = (tail_one_sample(n, k, lo, two), tail_one_sample(n, k, hi, two));
            prop_assert!((0.0..=1.0).contains(&a) && b <= a);
            let (a, b) = (tail_two_sample(n, u, k, lo, two), tail_two_sample(n, u, k, hi, two));
            prop_assert!((0.0..=1.0).contains(&a) && b <= a);
        }
        prop_assert!(tail_realizable(n, k, hi) <= tail_realizable(n, k, lo));
    }

    #[test]
    fn inverted_tail_meets_delta(n in 2u64..5000, k in 1u64..3, delta in 0.001f64..0.5) {
        prop_assume!(n >= k);
        let eps = invert_tail(n, k, delta, Tail::OneSample { two_sided: true });
        prop_assert!((tail_one_sample(n, k, eps, true) - delta).abs() < 1e-9);
        let eps = invert_tail(n, k, delta, Tail::Realizable);
        prop_assert!((tail_realizable(n, k, eps) - delta).abs() < 1e-9);
        let eps = invert_tail(n, k, delta, Tail::TwoSample { u: 2 * n, two_sided: false });
        prop_assert!((tail_two_sample(n, 2 * n, k, eps, false) - delta).abs() < 1e-9);
    }

    #[test]
    fn pac_bounds_monotone(
        q1 in 0.0f64..=1.0, q2 in 0.0f64..=1.0, n in 10u64..5000, u in 10u64..500,
        h in 1u64..20, delta in 0.01f64..0.5,
    ) {
        let (lo, hi) = if q1 < q2 { (q1, q2) } else { (q2, q1) };
        let c = LiteralCount::Signed;
        let bounds = |i: PacInputs| [
            pac_expected(i, c).unwrap().value,
            pac_actual(i, c).unwrap().value,
            pac_actual(i, c).unwrap().secondary.unwrap(),
            pac_voting(i, c).unwrap().value,
        ];
        let base = bounds(inputs(lo, n, u, 2, h, delta));
        let checks = [
            bounds(inputs(hi, n, u, 2, h, delta)),
            bounds(inputs(lo, 2 * n, u, 2, h, delta)),
        ];
        for other in checks {
            for (b, o) in base.iter().zip(other) {
                prop_assert!(*b >= 0.0 && o <= *b + 1e-9);
            }
        }
        for (b, o) in base.iter().zip(bounds(inputs(lo, n, u, 2, h + 1, delta / 2.0))) {
            prop_assert!(o >= *b - 1e-9);
        }
        let r = pac_realizable_expected(inputs(1.0, n, u, 2, h, delta), c).unwrap().value;
        prop_assert!(r >= 0.0);
        prop_assert!(worst_case_k(hi, u, 2, 1).unwrap() <= worst_case_k(lo, u, 2, 1).unwrap());
    }
}
