use proptest::prelude::*;

use sharp_ineq::cli::to_json;
use sharp_ineq::optimize::make_objective;
use sharp_ineq::verify::{holder_split_check, verify_case};
use sharp_ineq::{InequalityCase, QuadratureSpec, RadialProfile, Variant, VerificationReport};

fn case_strategy() -> impl Strategy<Value = InequalityCase> {
    prop_oneof![
        (3u32..7, 1.2f64..2.8).prop_map(|(n, p)| InequalityCase::hardy_subcritical(n, p).unwrap()),
        (1.3f64..4.0).prop_map(|p| InequalityCase::hardy_1d(p).unwrap()),
        (3u32..7, -1.5f64..0.4).prop_map(|(n, a)| InequalityCase::ckn_edge_plus1(n, a).unwrap()),
        (3u32..7, -1.0f64..0.0).prop_map(|(n, a)| InequalityCase::ckn_edge_equal(n, a).unwrap()),
        (3u32..6, -0.5f64..0.4, 0.1f64..0.9)
            .prop_map(|(n, a, t)| InequalityCase::ckn_interpolated_theta(n, a, t).unwrap()),
        (5u32..10).prop_map(|n| InequalityCase::rellich(n).unwrap()),
    ]
}

fn ratio(case: &InequalityCase, profile: &RadialProfile) -> f64 {
    verify_case(case, profile, &QuadratureSpec::default(), None)
        .unwrap()
        .ratio
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ratio_is_invariant_under_amplitude(case in case_strategy(), c in prop_oneof![0.05f64..20.0, -20.0f64..-0.05]) {
        // the one-dimensional functional is defined for nonnegative profiles only
        let c = if case.variant() == Variant::Hardy1D { c.abs() } else { c };
        let base = RadialProfile::mollifier(1.0).unwrap();
        let (r0, r1) = (ratio(&case, &base), ratio(&case, &base.scaled(c)));
        prop_assert!(((r1 - r0) / r0).abs() < 1e-9, "{r0} vs {r1}");
    }

    #[test]
    fn ratio_is_invariant_under_dilation(case in case_strategy(), radius in 0.1f64..10.0) {
        let r0 = ratio(&case, &RadialProfile::mollifier(1.0).unwrap());
        let r1 = ratio(&case, &RadialProfile::mollifier(radius).unwrap());
        prop_assert!(((r1 - r0) / r0).abs() < 1e-8, "{r0} vs {r1}");
    }

    #[test]
    fn mollifier_ratio_is_positive(case in case_strategy()) {
        let r = ratio(&case, &RadialProfile::mollifier(1.0).unwrap());
        prop_assert!(r > 0.0 && r.is_finite());
    }

    #[test]
    fn one_dimensional_objective_exceeds_its_minimum(p in 1.2f64..6.0, shift in prop_oneof![0.01f64..0.9, 1.1f64..5.0]) {
        let case = InequalityCase::hardy_1d(p).unwrap();
        let q = case.q();
        let obj = make_objective(&case).unwrap();
        let argmin = q.powf(-1.0 / q);
        let lambda = argmin * shift;
        let min = (p / (p - 1.0)).powf(p);
        let v = obj.evaluate(&[lambda]);
        prop_assert!(((obj.evaluate(&[argmin]) - min) / min).abs() < 1e-12);
        if lambda < 1.0 {
            prop_assert!(v > min * (1.0 + 1e-12), "f({lambda}) = {v} vs {min}");
        } else {
            prop_assert!(v.is_infinite());
        }
    }

    #[test]
    fn holder_split_is_homogeneous_and_dilation_invariant(
        n in 3u32..6,
        a in -0.5f64..0.4,
        theta in 0.1f64..0.9,
        c in 0.1f64..10.0,
        radius in 0.2f64..5.0,
    ) {
        let quad = QuadratureSpec::default();
        let base = RadialProfile::mollifier(1.0).unwrap();
        let r0 = holder_split_check(n, a, theta, &base, &quad).unwrap();
        let r1 = holder_split_check(n, a, theta, &base.scaled(c), &quad).unwrap();
        let r2 = holder_split_check(n, a, theta, &RadialProfile::mollifier(radius).unwrap(), &quad).unwrap();
        prop_assert!(r0.ratio <= 1.0 + 1e-9);
        prop_assert!(((r1.lhs / r0.lhs) / c.powf(r0.p) - 1.0).abs() < 1e-9);
        prop_assert!(((r1.ratio - r0.ratio) / r0.ratio).abs() < 1e-9);
        prop_assert!(((r2.ratio - r0.ratio) / r0.ratio).abs() < 1e-8);
    }

    #[test]
    fn report_json_round_trips(case in case_strategy(), radius in 0.1f64..10.0) {
        let report = verify_case(&case, &RadialProfile::mollifier(radius).unwrap(), &QuadratureSpec::default(), None).unwrap();
        let text = to_json(&report).unwrap();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &report);
        prop_assert_eq!(to_json(&back).unwrap(), text);
    }
}
