//! Executes scenarios and collects checks into a report.

use qew_core::chart::{ExactChart, ScalarField};
use qew_core::cohomogeneity::{
    contradicts_nonexistence, shoot, steady_invariant, sweep, Profile, QuasiEinsteinSpec, ShootOptions, Termination,
};
use qew_core::conformal::{change_identity_residual, laplacian_identity_residual, RescaleSpec};
use qew_core::curvature::{bochner_residual, weighted_tensors};
use qew_core::estimate::{
    gradient_estimate_check, laplacian_comparison_check, soliton_rescale_workflow, BallSpec, EstimateOptions,
    EstimateReport, HypothesisMode, RadialData, WorkflowOptions,
};
use qew_core::models::{
    Euclidean, LogCosh, ModelChart, Quadratic, RandomAnalyticMetric, RandomTrigPotential, Sinusoid,
    SumField,
};
use qew_core::warped::{assemble, einstein_residual, mu_field, FiberSpec};
use qew_core::Weight;

use crate::config::{ChartParams, EstimateParams, Scenario, ScenarioKind, ShootParams, WarpedParams, WorkflowParams};
use crate::error::CliError;
use crate::output::profile_csv;
use crate::report::{Check, Report};

/// A file produced by a run, written by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

fn e(v: f64) -> String {
    format!("{v:e}")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), |x| x.to_string())
}

pub fn execute(s: &Scenario) -> Result<Outcome, CliError> {
    let mut report = Report::new(&s.name);
    report.param("kind", s.kind.label());
    let mut artifacts = Vec::new();
    match &s.kind {
        ScenarioKind::ChartIdentities(p) => chart_identities(s, p, &mut report)?,
        ScenarioKind::WarpedProduct(p) => warped_product(s, p, &mut report)?,
        ScenarioKind::Shoot(p) => {
            let profile = shoot_scenario(s, p, &mut report)?;
            if p.csv {
                artifacts.push(Artifact { file_name: format!("{}.csv", s.name), bytes: profile_csv(&profile)? });
            }
        }
        ScenarioKind::EstimateSuite(p) => estimate_suite(s, p, &mut report)?,
        ScenarioKind::RescaleWorkflow(p) => rescale_workflow(s, p, &mut report)?,
    }
    Ok(Outcome { report, artifacts })
}

fn chart_identities(s: &Scenario, p: &ChartParams, report: &mut Report) -> Result<(), CliError> {
    let tol = s.tol(p.tol, 1e-8);
    let default_m = match p.model.as_str() {
        "gaussian" => Weight::Infinite,
        _ => Weight::Finite(2.0),
    };
    let m = p.m.as_ref().map(|w| w.resolve()).transpose()?.unwrap_or(default_m);
    let (chart, lambda, dim): (Box<dyn ExactChart>, Option<f64>, usize) = match p.model.as_str() {
        "logcosh-line" => {
            let Weight::Finite(mv) = m else {
                return Err(CliError::Schema("params.m: the log-cosh line needs a finite weight".into()));
            };
            let chart = ModelChart::new(Euclidean { dim: 1 }, LogCosh { dim: 1, axis: 0, amplitude: -mv, rate: p.c });
            (Box::new(chart), Some(p.lambda.unwrap_or(-mv * p.c * p.c)), 1)
        }
        "gaussian" => {
            let default = if m.is_infinite() { Some(1.0) } else { None };
            (Box::new(ModelChart::new(Euclidean { dim: p.dim }, Quadratic::gaussian(p.dim))), p.lambda.or(default), p.dim)
        }
        _ => {
            let chart = ModelChart::new(
                RandomAnalyticMetric::generate(p.dim, p.seed),
                RandomTrigPotential::generate(p.dim, p.seed),
            );
            (Box::new(chart), p.lambda, p.dim)
        }
    };
    let x = match &p.point {
        Some(x) if x.len() == dim => x.clone(),
        Some(x) => return Err(CliError::Schema(format!("params.point has {} entries, dimension is {dim}", x.len()))),
        None if dim == 1 => vec![0.7],
        None => (0..dim).map(|i| 0.1 * (i as f64 + 1.0) * if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
    };
    report.param("model", &p.model);
    report.param("dim", dim);
    report.param("m", m);
    report.param("c", p.c);
    report.param("lambda", opt(&lambda));
    report.param("m_tilde", p.m_tilde);
    report.param("point", format!("{x:?}"));
    report.param("seed", p.seed);
    report.param("h", e(p.h));
    report.param("tol", e(tol));
    report.param("bochner_tol", e(p.bochner_tol));

    let sample = chart.sample(&x);
    if let Some(lambda) = lambda {
        let wc = weighted_tensors(&sample, m)?;
        let r = (&wc.bakry_emery - &sample.metric * lambda).amax();
        report.check(Check::absolute("quasi_einstein", r, tol));
    }
    let spec = RescaleSpec::new(Weight::Finite(p.m_tilde), dim)?;
    report.check(Check::absolute("change_identity", change_identity_residual(&sample, &spec)?.amax(), tol));
    let u = Quadratic::random(dim, p.seed + 1);
    let l = laplacian_identity_residual(&sample, &spec, &u.jet(&x))?;
    report.check(Check::absolute("laplacian_identity", l, tol));
    let b = bochner_residual(chart.as_ref(), &u, &x, m, p.h)?;
    report.check(Check::absolute("bochner", b.residual, p.bochner_tol));
    if let Some(w) = b.warning {
        report.note("bochner_roundoff_warning", e(w.roundoff_estimate));
    }
    Ok(())
}

fn warped_product(s: &Scenario, p: &WarpedParams, report: &mut Report) -> Result<(), CliError> {
    let tol = s.tol(p.tol, 1e-8);
    let m = p.m as f64;
    let lambda = p.lambda.unwrap_or(-m * p.c * p.c);
    let mut parts: Vec<Box<dyn ScalarField>> =
        vec![Box::new(LogCosh { dim: 1, axis: 0, amplitude: -m, rate: p.c })];
    if p.perturbation != 0.0 {
        parts.push(Box::new(Sinusoid { dim: 1, axis: 0, amplitude: p.perturbation, freq: 1.0, phase: 0.0 }));
    }
    let base = ModelChart::new(Euclidean { dim: 1 }, SumField::new(1, parts));
    let fiber = match p.fiber.as_str() {
        // scaled so that its Einstein constant is −(m−1)c²
        "hyperbolic" => FiberSpec::hyperbolic(p.m).scaled(1.0 / (p.c * p.c)),
        "sphere" => FiberSpec::sphere(p.m),
        _ => FiberSpec::flat(p.m),
    };
    report.param("m", p.m);
    report.param("c", p.c);
    report.param("fiber", &p.fiber);
    report.param("lambda", lambda);
    report.param("perturbation", p.perturbation);
    report.param("t_range", format!("[{}, {}]", p.t_min, p.t_max));
    report.param("points", p.points);
    report.param("tol", e(tol));

    let weight = Weight::Finite(m);
    let mut worst = 0.0f64;
    let mut mus = Vec::with_capacity(p.points);
    for k in 0..p.points {
        let t = if p.points == 1 {
            p.t_min
        } else {
            p.t_min + (p.t_max - p.t_min) * k as f64 / (p.points - 1) as f64
        };
        let sample = base.sample(&[t]);
        let ws = assemble(&sample, &fiber)?;
        worst = worst.max(einstein_residual(&ws, lambda)?.amax());
        mus.push(mu_field(&sample, weight, lambda)?);
    }
    let mean = mus.iter().sum::<f64>() / mus.len() as f64;
    let std = (mus.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / mus.len() as f64).sqrt();
    report.check(Check::absolute("einstein_residual", worst, tol));
    report.check(Check::absolute("mu_constancy", std, tol));
    report.check(Check::absolute("mu_matches_fiber", mean - fiber.einstein_constant, tol));
    report.note("mu_mean", e(mean));
    report.note("fiber_einstein_constant", e(fiber.einstein_constant));
    Ok(())
}

fn shoot_options(p: &ShootParams) -> ShootOptions {
    ShootOptions {
        seed_radius: p.eps0,
        seed_tolerance: p.seed_tol,
        rtol: p.rtol,
        atol: p.atol,
        max_step: p.max_step,
        blowup_threshold: p.blowup_threshold,
        ..ShootOptions::default()
    }
}

fn shoot_spec(p: &ShootParams) -> Result<QuasiEinsteinSpec, CliError> {
    let m = p.m.as_ref().ok_or_else(|| CliError::Schema("params.m is required".into()))?.resolve()?;
    Ok(QuasiEinsteinSpec::new(p.n.unwrap_or(0), m, p.lambda)?)
}

fn shoot_params_echo(p: &ShootParams, spec: &QuasiEinsteinSpec, report: &mut Report) {
    report.param("n", spec.n);
    report.param("m", spec.m);
    report.param("lambda", spec.lambda);
    report.param("r_max", p.r_max);
    report.param("eps0", e(p.eps0));
    report.param("seed_tol", e(p.seed_tol));
    report.param("rtol", e(p.rtol));
    report.param("atol", e(p.atol));
    report.param("max_step", p.max_step);
    report.param("blowup_threshold", e(p.blowup_threshold));
}

fn termination(t: &Termination) -> String {
    match t {
        Termination::Reached => "reached".into(),
        Termination::BlowUp { r_star } => format!("blow_up(r*={})", e(*r_star)),
        Termination::Degenerate { r_star } => format!("degenerate(r*={})", e(*r_star)),
    }
}

fn shoot_scenario(s: &Scenario, p: &ShootParams, report: &mut Report) -> Result<Profile, CliError> {
    let spec = shoot_spec(p)?;
    let tol = s.tol(p.tol, 1e-6);
    let param = p.shoot_param.unwrap_or(0.0);
    shoot_params_echo(p, &spec, report);
    report.param("shoot_param", param);
    report.param("expect", opt(&p.expect));
    report.param("expect_r_star", opt(&p.expect_r_star));
    report.param("r_star_tol", p.r_star_tol);
    report.param("tol", e(tol));

    let profile = shoot(&spec, param, p.r_max, &shoot_options(p))?;
    if let Some(seed) = profile.seed {
        report.check(Check::excess("seed_residual", seed.residual, p.seed_tol));
    }
    let mu = profile.mu;
    report.check(Check::absolute("mu_constancy", mu.max_deviation / mu.value.abs().max(1.0), tol));
    let contradiction = contradicts_nonexistence(&profile);
    report.check(Check::with_pass("nonexistence_witness", f64::from(u8::from(contradiction)), 0.0, !contradiction));
    if let Some(label) = &p.expect {
        let ok = profile.classification.label() == label;
        report.check(Check::with_pass("classification", f64::from(u8::from(!ok)), 0.0, ok));
    }
    if let Some(expected) = p.expect_r_star {
        let rel = profile.classification.r_star().map_or(f64::INFINITY, |r| (r - expected).abs() / expected.abs());
        report.check(Check::excess("r_star", rel, p.r_star_tol));
    }
    if spec.m.is_infinite() && spec.lambda == 0.0 {
        let steady = steady_invariant(&profile)?;
        let scale = steady.value.abs().max(f64::MIN_POSITIVE);
        report.check(Check::absolute("steady_constancy", steady.max_deviation / scale, tol));
        report.check(Check::absolute("steady_matches_mu", (steady.value - mu.value) / scale, tol));
        report.check(Check::with_pass("steady_positive", -steady.value, 0.0, steady.value > 0.0));
        report.note("steady_invariant", e(steady.value));
    }
    report.note("classification", profile.classification.label());
    report.note("r_star", opt(&profile.classification.r_star().map(e)));
    report.note("mu", e(mu.value));
    report.note("points", profile.len());
    report.note("forward", termination(&profile.forward));
    if let Some(b) = &profile.backward {
        report.note("backward", termination(b));
    }
    Ok(profile)
}

fn estimate_checks(report: &mut Report, name: &str, r: &EstimateReport) {
    report.check(Check::with_pass(name, r.observed - r.bound, r.tol, r.pass));
}

fn estimate_suite(s: &Scenario, p: &EstimateParams, report: &mut Report) -> Result<(), CliError> {
    let sp = ShootParams { n: p.n, m: p.m.clone(), lambda: p.lambda, shoot_param: p.shoot_param, r_max: p.r_max, ..Default::default() };
    let spec = shoot_spec(&sp)?;
    let tol = s.tol(p.tol, qew_core::estimate::VERDICT_TOL);
    let mode = if p.mode == "report" { HypothesisMode::Report } else { HypothesisMode::Strict };
    let opts = EstimateOptions { verdict_tol: tol, hypothesis_tol: p.hypothesis_tol, mode };
    shoot_params_echo(&sp, &spec, report);
    report.param("shoot_param", opt(&p.shoot_param));
    report.param("balls", format!("{:?}", p.balls));
    report.param("laplacian_center", p.laplacian_center);
    report.param("laplacian_radius", opt(&p.laplacian_radius));
    report.param("mode", &p.mode);
    report.param("tol", e(tol));
    report.param("hypothesis_tol", e(p.hypothesis_tol));

    let profile = shoot(&spec, p.shoot_param.unwrap_or(0.0), p.r_max, &ShootOptions::default())?;
    report.note("classification", profile.classification.label());
    let data = RadialData::from_profile(&profile);
    for (i, [c, a]) in p.balls.iter().enumerate() {
        let r = gradient_estimate_check(&data, &BallSpec::new(*c, *a)?, &opts)?;
        estimate_checks(report, &format!("gradient_center[{i}]"), &r.center);
        estimate_checks(report, &format!("gradient_barrier[{i}]"), &r.barrier);
        report.note(&format!("hypotheses[{i}]"), if r.hypotheses.satisfied { "verified" } else { "unverified" });
        for (k, n) in r.hypotheses.notes.iter().enumerate() {
            report.note(&format!("hypotheses[{i}].{k}"), n);
        }
    }
    let (g0, g1) = data.range();
    let c = p.laplacian_center;
    let radius = p.laplacian_radius.unwrap_or(if spec.n >= 2 { g1 - c } else { (c - g0).min(g1 - c) });
    let lap = laplacian_comparison_check(&data, &BallSpec::new(c, radius)?, &opts)?;
    estimate_checks(report, "laplacian_comparison", &lap.report);
    report.note("laplacian_witness", e(lap.report.witness));
    Ok(())
}

fn rescale_workflow(s: &Scenario, p: &WorkflowParams, report: &mut Report) -> Result<(), CliError> {
    let tol = s.tol(p.tol, qew_core::estimate::VERDICT_TOL);
    let m_tilde = p.m_tilde.resolve()?;
    report.param("n", p.n);
    report.param("shoot_param", p.shoot_param);
    report.param("r_max", p.r_max);
    report.param("m_tilde", m_tilde);
    report.param("ball_radius", p.ball_radius);
    report.param("comparison_radius", opt(&p.comparison_radius));
    report.param("segment", format!("[{}, {}]", p.segment[0], p.segment[1]));
    report.param("tol", e(tol));
    report.param("hypothesis_tol", e(p.hypothesis_tol));

    let spec = QuasiEinsteinSpec::new(p.n, Weight::Infinite, 0.0)?;
    let profile = shoot(&spec, p.shoot_param, p.r_max, &ShootOptions::default())?;
    let opts = WorkflowOptions {
        ball_radius: p.ball_radius,
        comparison_radius: p.comparison_radius,
        segment: (p.segment[0], p.segment[1]),
        estimate: EstimateOptions { verdict_tol: tol, hypothesis_tol: p.hypothesis_tol, mode: HypothesisMode::Report },
    };
    let w = soliton_rescale_workflow(&profile, m_tilde, &opts)?;
    report.check(Check::with_pass("threshold", w.constant / w.m_tilde - 1.0, 0.0, w.threshold_holds));
    report.check(Check::with_pass("corollary_lower_bound", -w.corollary_margin, p.hypothesis_tol, w.corollary_pass));
    estimate_checks(report, "gradient_center", &w.gradient.center);
    estimate_checks(report, "gradient_barrier", &w.gradient.barrier);
    estimate_checks(report, "laplacian_comparison", &w.laplacian.report);
    let finite = w.length.is_finite() && w.length > 0.0;
    report.check(Check::with_pass("conformal_length_finite", w.length, f64::INFINITY, finite));
    report.note("classification", profile.classification.label());
    report.note("constant", e(w.constant));
    report.note("minimal_m_tilde", w.minimal_m_tilde);
    report.note("conformal_length", e(w.length));
    report.note("corollary_witness", e(w.corollary_witness));
    let verified = w.gradient.hypotheses.satisfied && w.laplacian.hypotheses.satisfied;
    report.note("rescaled_hypotheses", if verified { "verified" } else { "unverified" });
    Ok(())
}

/// Shoots a `shoot` scenario once per value of the shooting parameter.
pub fn execute_sweep(s: &Scenario, values: &[f64]) -> Result<Outcome, CliError> {
    let ScenarioKind::Shoot(p) = &s.kind else {
        return Err(CliError::Schema(format!("sweeps need a shoot scenario, got {}", s.kind.label())));
    };
    let spec = shoot_spec(p)?;
    let mut report = Report::new(&s.name);
    report.param("kind", "shoot-sweep");
    shoot_params_echo(p, &spec, &mut report);
    report.param("shoot_param_values", values.len());
    let mut csv = String::from("shoot_param,classification,r_star,mu,mu_max_deviation\n");
    for (v, run) in values.iter().zip(sweep(&spec, values, p.r_max, &shoot_options(p))) {
        let profile = run?;
        let contradiction = contradicts_nonexistence(&profile);
        report.check(Check::with_pass(
            format!("nonexistence_witness[{}]", e(*v)),
            f64::from(u8::from(contradiction)),
            0.0,
            !contradiction,
        ));
        let r_star = profile.classification.r_star().map(|r| format!("{r:.16e}")).unwrap_or_default();
        csv.push_str(&format!(
            "{:.16e},{},{},{:.16e},{:.16e}\n",
            v,
            profile.classification.label(),
            r_star,
            profile.mu.value,
            profile.mu.max_deviation
        ));
    }
    let artifacts = vec![Artifact { file_name: format!("{}.sweep.csv", s.name), bytes: csv.into_bytes() }];
    Ok(Outcome { report, artifacts })
}

/// `a:b:steps` — `steps` evenly spaced values including both ends.
pub fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Schema(format!("--range must look like a:b:steps, got {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, k] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    if k == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if k == 1 {
        return Ok(vec![a]);
    }
    Ok((0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("-1:1:3").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(parse_range("0.5:2:1").unwrap(), vec![0.5]);
        assert!(parse_range("1:2").is_err());
        assert!(parse_range("1:2:0").is_err());
        assert!(parse_range("a:2:3").is_err());
    }
}
