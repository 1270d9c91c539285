//! The reduced ODE against the full curvature engine, plus shooting oracles.

use qew_core::cohomogeneity::{
    contradicts_nonexistence, ode_rhs, shoot, steady_invariant, sweep, Classification, ProfileState,
    QuasiEinsteinSpec, ShootOptions,
};
use qew_core::curvature::weighted_tensors;
use qew_core::models::rotational_sample;
use qew_core::Weight;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn reduced_equations_match_the_chart_engine() {
    let weights = [Weight::Finite(1.0), Weight::Finite(2.0), Weight::Finite(5.0), Weight::Infinite];
    let mut worst = 0.0f64;
    for n in 2..=4 {
        for (k, &m) in weights.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 * n as u64 + k as u64);
            for _ in 0..1000 {
                let lambda = rng.gen_range(-2.0..2.0);
                let spec = QuasiEinsteinSpec::new(n, m, lambda).unwrap();
                let st = ProfileState {
                    r: rng.gen_range(0.2..3.0),
                    w: rng.gen_range(0.3..3.0),
                    wp: rng.gen_range(-2.0..2.0),
                    f: rng.gen_range(-1.0..1.0),
                    fp: rng.gen_range(-2.0..2.0),
                };
                let (wpp, fpp) = ode_rhs(&st, &spec).unwrap();
                let sample = rotational_sample(n, st.r, [st.w, st.wp, wpp], [st.f, st.fp, fpp]);
                let wc = weighted_tensors(&sample, m).unwrap();
                let resid = &wc.bakry_emery - &sample.metric * lambda;
                // relative to the size of the metric block entries
                let scale = 1.0 + sample.metric.amax();
                worst = worst.max(resid.amax() / scale);
            }
        }
    }
    assert!(worst < 1e-7, "worst residual {worst:e}");
}

#[test]
fn perturbed_second_derivative_is_detected() {
    let spec = QuasiEinsteinSpec::new(3, Weight::Finite(2.0), 0.5).unwrap();
    let st = ProfileState { r: 1.0, w: 0.9, wp: 0.7, f: 0.1, fp: -0.4 };
    let (wpp, fpp) = ode_rhs(&st, &spec).unwrap();
    let sample = rotational_sample(3, st.r, [st.w, st.wp, wpp], [st.f, st.fp, fpp + 1e-3]);
    let wc = weighted_tensors(&sample, spec.m).unwrap();
    assert!((&wc.bakry_emery - &sample.metric * 0.5).amax() > 1e-4);
}

#[test]
fn bryant_profile_to_ten() {
    let spec = QuasiEinsteinSpec::new(3, Weight::Infinite, 0.0).unwrap();
    let p = shoot(&spec, -0.5, 10.0, &ShootOptions::default()).unwrap();
    assert_eq!(p.classification, Classification::CompleteToHorizon);
    let steady = steady_invariant(&p).unwrap();
    assert!(steady.value > 0.0);
    assert!((steady.value - 3.0).abs() < 1e-6 * 3.0);
    assert!(steady.max_deviation < 1e-6 * steady.value);
    assert!((steady.value - p.mu.value).abs() < 1e-6 * steady.value);
}

#[test]
fn line_blow_up_matches_closed_form() {
    let spec = QuasiEinsteinSpec::new(1, Weight::Finite(2.0), 0.0).unwrap();
    let p = shoot(&spec, 1.0, 5.0, &ShootOptions::default()).unwrap();
    let r_star = p.classification.r_star().unwrap();
    assert!((r_star - 2.0).abs() < 1e-6);
    for st in p.states.iter().filter(|s| s.r < 1.9) {
        let exact = 1.0 / (1.0 - st.r / 2.0);
        assert!((st.fp - exact).abs() < 1e-8 * exact, "r = {}", st.r);
    }
}

#[test]
fn steady_sweeps_have_no_nonpositive_complete_profiles() {
    let params: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
    for m in [1.0, 2.0, 5.0, 10.0] {
        for n in [1, 3] {
            let spec = QuasiEinsteinSpec::new(n, Weight::Finite(m), 0.0).unwrap();
            for p in sweep(&spec, &params, 10.0, &ShootOptions::default()) {
                let p = p.unwrap();
                assert!(!contradicts_nonexistence(&p), "n={n} m={m} s={} {}", p.shoot_param, p.classification);
            }
        }
    }
}

#[test]
fn steady_scaling_covariance() {
    // for λ = 0, (w(r), f(r)) ↦ (k w(r/k), f(r/k)) maps solutions to solutions with s ↦ s/k²
    let spec = QuasiEinsteinSpec::new(3, Weight::Finite(3.0), 0.0).unwrap();
    let k = 2.0;
    let a = shoot(&spec, -0.4, 3.0, &ShootOptions::default()).unwrap();
    let b = shoot(&spec, -0.4 / (k * k), 3.0 * k, &ShootOptions::default()).unwrap();
    for r in [0.5, 1.0, 2.0, 3.0] {
        let sa = a.interpolate(r);
        let sb = b.interpolate(k * r);
        assert!((sb.w - k * sa.w).abs() < 1e-6 * (1.0 + sb.w.abs()), "w at {r}");
        assert!((sb.f - sa.f).abs() < 1e-6 * (1.0 + sa.f.abs()), "f at {r}");
        assert!((sb.fp - sa.fp / k).abs() < 1e-6 * (1.0 + sa.fp.abs()), "f' at {r}");
    }
}
