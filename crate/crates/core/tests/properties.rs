use proptest::prelude::*;
use qew_core::chart::ExactChart;
use qew_core::conformal::{change_identity_residual, inverse_rescale, rescale_triple, RescaleSpec};
use qew_core::estimate::{gradient_bound, minimal_m_tilde, rescaling_constant};
use qew_core::models::{ModelChart, RandomAnalyticMetric, RandomTrigPotential};
use qew_core::Weight;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_text_round_trips(m in 1e-3f64..1e6) {
        let w = Weight::parse(&m.to_string()).unwrap();
        prop_assert_eq!(w.value(), Some(m));
        prop_assert!((w.reciprocal() * m - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rescaling_inverts_and_satisfies_the_change_identity(
        seed in 0u64..1000,
        m in 0.5f64..40.0,
        x in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let chart = ModelChart::new(RandomAnalyticMetric::generate(3, seed), RandomTrigPotential::generate(3, seed));
        let s = chart.sample(&x);
        let spec = RescaleSpec::new(Weight::Finite(m), 3).unwrap();
        let back = inverse_rescale(&rescale_triple(&s, &spec).unwrap(), &spec).unwrap();
        prop_assert!((&back.metric - &s.metric).amax() < 1e-12);
        prop_assert!((back.potential - s.potential).abs() < 1e-12 * (1.0 + s.potential.abs()));
        prop_assert!(change_identity_residual(&s, &spec).unwrap().amax() < 1e-10);
    }

    #[test]
    fn gradient_bound_scales_inverse_square(n in 1usize..8, m in 0.1f64..50.0, a in 0.1f64..10.0, k in 0.5f64..4.0) {
        let b = gradient_bound(n, m, a);
        prop_assert!(b > 0.0);
        prop_assert!((gradient_bound(n, m, k * a) * k * k / b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn minimal_rescaling_weight_is_the_threshold(n in 1usize..12) {
        let k = minimal_m_tilde(n) as f64;
        prop_assert!(rescaling_constant(n, k) < k);
        prop_assert!(rescaling_constant(n, k - 1.0) >= k - 1.0);
    }
}
