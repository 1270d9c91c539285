use qew_core::chart::{ExactChart, ScalarField};
use qew_core::conformal::*;
use qew_core::models::*;
use qew_core::Weight;

fn random_chart(seed: u64) -> ModelChart<RandomAnalyticMetric, RandomTrigPotential> {
    ModelChart::new(RandomAnalyticMetric::generate(3, seed), RandomTrigPotential::generate(3, seed))
}

#[test]
fn exact_derivatives_make_both_identities_vanish() {
    for seed in 0..10 {
        let chart = random_chart(seed);
        let s = chart.sample(&[0.3, -0.1, 0.4]);
        for m in [0.5, 2.0, 5.0, 31.0] {
            let spec = RescaleSpec::new(Weight::Finite(m), 3).unwrap();
            let r = change_identity_residual(&s, &spec).unwrap();
            assert!(r.amax() < 1e-12, "seed {seed} m {m}: {}", r.amax());
            let u = Quadratic::random(3, seed + 100).jet(&[0.3, -0.1, 0.4]);
            let l = laplacian_identity_residual(&s, &spec, &u).unwrap();
            assert!(l.abs() < 1e-12, "seed {seed} m {m}: {l}");
        }
    }
}

#[test]
fn differenced_identities_converge_at_second_order() {
    let x = [0.3, -0.1, 0.4];
    let spec = RescaleSpec::new(Weight::Finite(5.0), 3).unwrap();
    for seed in 0..10 {
        let chart = random_chart(seed);
        let u = Quadratic::random(3, seed + 7);
        let coarse = change_identity_residual_differenced(&chart, &x, &spec, 1e-3).unwrap().amax();
        let fine = change_identity_residual_differenced(&chart, &x, &spec, 5e-4).unwrap().amax();
        let lc = laplacian_identity_residual_differenced(&chart, &x, &spec, &u, 1e-3).unwrap().abs();
        let lf = laplacian_identity_residual_differenced(&chart, &x, &spec, &u, 5e-4).unwrap().abs();
        println!("seed {seed}: change {coarse:e} -> {fine:e} ratio {}, lap {lc:e} -> {lf:e} ratio {}", coarse / fine, lc / lf);
        assert!((3.5..=4.5).contains(&(coarse / fine)));
        assert!((3.5..=4.5).contains(&(lc / lf)));
    }
}

#[test]
fn inverse_rescaling_round_trips() {
    let chart = random_chart(21);
    let s = chart.sample(&[0.1, 0.5, -0.6]);
    let spec = RescaleSpec::new(Weight::Finite(3.0), 3).unwrap();
    let back = inverse_rescale(&rescale_triple(&s, &spec).unwrap(), &spec).unwrap();
    assert!((&back.metric - &s.metric).amax() < 1e-14);
    assert!((back.metric_d2.max_abs() - s.metric_d2.max_abs()).abs() < 1e-13);
    assert!((back.potential - s.potential).abs() < 1e-14);
}
