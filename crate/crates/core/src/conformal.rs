//! The one-parameter conformal rescaling
//!
//! `g̃ = exp(−2f/(m̃+n−2))·g`, `f̃ = (m̃/(m̃+n−2))·f`,
//!
//! which trades the `m = ∞` Bakry-Émery tensor of `(g, f)` for a finite-`m̃`
//! one of `(g̃, f̃)` with a positive quadratic term, together with residual
//! checks of the resulting change-of-curvature and change-of-Laplacian
//! identities and the induced lower bound.

use nalgebra::DMatrix;

use crate::chart::{sample_by_differences, Chart, ChartSample, ExactChart, ScalarField, ScalarJet};
use crate::curvature::{curvature, drift_laplacian, min_eigenvalue_relative, weighted_tensors};
use crate::error::{Error, Result};
use crate::tensor::{Tensor3, Tensor4};
use crate::weight::Weight;

/// Eigenvalue tolerance for exact-derivative samples.
pub const EXACT_TOL: f64 = 1e-9;
/// Eigenvalue tolerance for finite-difference samples.
pub const STENCIL_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaleSpec {
    m_tilde: f64,
    dim: usize,
}

impl RescaleSpec {
    pub fn new(m_tilde: Weight, dim: usize) -> Result<Self> {
        let m = m_tilde
            .value()
            .ok_or_else(|| Error::domain("the rescaling needs a finite target weight"))?;
        if dim == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if m + dim as f64 - 2.0 <= 0.0 {
            return Err(Error::domain(format!("m̃ + n − 2 must be positive (m̃ = {m}, n = {dim})")));
        }
        Ok(Self { m_tilde: m, dim })
    }

    pub fn m_tilde(&self) -> f64 {
        self.m_tilde
    }

    pub fn weight(&self) -> Weight {
        Weight::Finite(self.m_tilde)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `m̃ + n − 2`
    pub fn denominator(&self) -> f64 {
        self.m_tilde + self.dim as f64 - 2.0
    }

    /// Coefficient of `f` in the exponent of the metric factor, `−2/(m̃+n−2)`.
    pub fn metric_exponent(&self) -> f64 {
        -2.0 / self.denominator()
    }

    /// `m̃/(m̃+n−2)`
    pub fn potential_factor(&self) -> f64 {
        self.m_tilde / self.denominator()
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim {
            return Err(Error::domain(format!("rescale spec is for dimension {}, sample has {n}", self.dim)));
        }
        Ok(())
    }
}

/// `Δ_f f = c₁ exp(c₂ f)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceTerm {
    pub c1: f64,
    pub c2: f64,
}

impl SourceTerm {
    pub fn eval(&self, f: f64) -> f64 {
        self.c1 * (self.c2 * f).exp()
    }
}

/// `g' = exp(a·f)·g`, `f' = b·f`, with every derivative array obtained by the
/// chain rule from the input jets.
fn conformal_scale(sample: &ChartSample, a: f64, b: f64) -> ChartSample {
    let n = sample.dim();
    let g = &sample.metric;
    let d1 = &sample.metric_d1;
    let d2 = &sample.metric_d2;
    let fd1 = &sample.potential_d1;
    let fd2 = &sample.potential_d2;

    let phi = (a * sample.potential).exp();
    let dphi = fd1 * (a * phi);
    let ddphi = DMatrix::from_fn(n, n, |k, l| phi * (a * a * fd1[k] * fd1[l] + a * fd2[(k, l)]));

    let metric = g * phi;
    let metric_d1 = Tensor3::from_fn(n, |i, j, k| dphi[k] * g[(i, j)] + phi * d1[(i, j, k)]);
    let metric_d2 = Tensor4::from_fn(n, |i, j, k, l| {
        ddphi[(k, l)] * g[(i, j)] + dphi[k] * d1[(i, j, l)] + dphi[l] * d1[(i, j, k)] + phi * d2[(i, j, k, l)]
    });

    ChartSample {
        point: sample.point.clone(),
        metric,
        metric_d1,
        metric_d2,
        potential: b * sample.potential,
        potential_d1: fd1 * b,
        potential_d2: fd2 * b,
    }
}

/// The rescaled sample `(g̃, f̃)`.
pub fn rescale_triple(sample: &ChartSample, spec: &RescaleSpec) -> Result<ChartSample> {
    spec.check_dim(sample.dim())?;
    Ok(conformal_scale(sample, spec.metric_exponent(), spec.potential_factor()))
}

/// Undoes [`rescale_triple`]: from `(g̃, f̃)` recovers `g = exp(2f̃/m̃)·g̃` and
/// `f = ((m̃+n−2)/m̃)·f̃`.
pub fn inverse_rescale(sample: &ChartSample, spec: &RescaleSpec) -> Result<ChartSample> {
    spec.check_dim(sample.dim())?;
    Ok(conformal_scale(sample, 2.0 / spec.m_tilde, 1.0 / spec.potential_factor()))
}

/// The rescaled chart as a pointwise-evaluable chart, for differencing.
pub struct RescaledChart<'a> {
    pub chart: &'a dyn ExactChart,
    pub spec: RescaleSpec,
}

impl Chart for RescaledChart<'_> {
    fn dim(&self) -> usize {
        self.chart.dim()
    }
    fn metric_at(&self, x: &[f64]) -> DMatrix<f64> {
        self.chart.metric_at(x) * (self.spec.metric_exponent() * self.chart.potential_at(x)).exp()
    }
    fn potential_at(&self, x: &[f64]) -> f64 {
        self.spec.potential_factor() * self.chart.potential_at(x)
    }
}

/// `Ric(g) + ∇²f + (1/(m̃+n−2)) df⊗df + (1/(m̃+n−2)) (Δ_f f) g`, the predicted
/// Bakry-Émery tensor of the rescaled triple.
pub fn predicted_rescaled_tensor(sample: &ChartSample, spec: &RescaleSpec) -> Result<DMatrix<f64>> {
    spec.check_dim(sample.dim())?;
    let wc = weighted_tensors(sample, Weight::Infinite)?;
    let inv_d = 1.0 / spec.denominator();
    let df = &sample.potential_d1;
    Ok(&wc.bakry_emery + (df * df.transpose()) * inv_d + &sample.metric * (inv_d * wc.drift_laplacian_f))
}

/// `Ric_{f̃}^{m̃}(g̃)` computed from the rescaled jets minus its predicted value.
pub fn change_identity_residual(sample: &ChartSample, spec: &RescaleSpec) -> Result<DMatrix<f64>> {
    let rescaled = rescale_triple(sample, spec)?;
    let lhs = weighted_tensors(&rescaled, spec.weight())?.bakry_emery;
    Ok(lhs - predicted_rescaled_tensor(sample, spec)?)
}

/// As [`change_identity_residual`], but the left side is obtained by central
/// differences of step `h` of the rescaled chart rather than by the chain
/// rule. The residual is then the `O(h²)` truncation error of that stencil.
pub fn change_identity_residual_differenced(
    chart: &dyn ExactChart,
    x: &[f64],
    spec: &RescaleSpec,
    h: f64,
) -> Result<DMatrix<f64>> {
    let rescaled = sample_by_differences(&RescaledChart { chart, spec: *spec }, x, h);
    let lhs = weighted_tensors(&rescaled, spec.weight())?.bakry_emery;
    Ok(lhs - predicted_rescaled_tensor(&chart.sample(x), spec)?)
}

fn drift_laplacian_of(sample: &ChartSample, u: &ScalarJet) -> Result<f64> {
    let c = curvature(sample)?;
    Ok(drift_laplacian(&c.metric_inverse, &c.christoffel, &sample.potential_d1, u))
}

/// `Δ̃_{f̃} u − exp(2f/(m̃+n−2))·Δ_f u` at the sample point.
pub fn laplacian_identity_residual(sample: &ChartSample, spec: &RescaleSpec, u: &ScalarJet) -> Result<f64> {
    let rescaled = rescale_triple(sample, spec)?;
    let lhs = drift_laplacian_of(&rescaled, u)?;
    let rhs = (-spec.metric_exponent() * sample.potential).exp() * drift_laplacian_of(sample, u)?;
    Ok(lhs - rhs)
}

/// As [`laplacian_identity_residual`], with the rescaled chart differenced at step `h`.
pub fn laplacian_identity_residual_differenced(
    chart: &dyn ExactChart,
    x: &[f64],
    spec: &RescaleSpec,
    u: &dyn ScalarField,
    h: f64,
) -> Result<f64> {
    let rescaled = sample_by_differences(&RescaledChart { chart, spec: *spec }, x, h);
    let sample = chart.sample(x);
    let uj = u.jet(x);
    let lhs = drift_laplacian_of(&rescaled, &uj)?;
    let rhs = (-spec.metric_exponent() * sample.potential).exp() * drift_laplacian_of(&sample, &uj)?;
    Ok(lhs - rhs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryVerdict {
    /// Smallest eigenvalue, relative to `g̃`, of
    /// `Ric_{f̃}^{m̃}(g̃) − (c₁/(m̃+n−2))·exp((c₂ + 2/(m̃+n−2))f)·g̃`.
    pub margin: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks the lower bound on the rescaled Bakry-Émery tensor implied by
/// `Ric_f ≥ 0` and `Δ_f f = c₁e^{c₂f}`.
///
/// Both hypotheses are verified at the sample point first; a failure is
/// reported as [`Error::HypothesisViolated`] and no verdict is returned.
/// The source relation is checked to `tol` relative to `max(1, |c₁e^{c₂f}|)`.
pub fn corollary_lower_bound(
    sample: &ChartSample,
    spec: &RescaleSpec,
    src: &SourceTerm,
    tol: f64,
) -> Result<CorollaryVerdict> {
    spec.check_dim(sample.dim())?;
    let wc = weighted_tensors(sample, Weight::Infinite)?;
    let ric_f_min = min_eigenvalue_relative(&wc.bakry_emery, &sample.metric)?;
    if ric_f_min < -tol {
        return Err(Error::hypothesis(format!("Ric_f ≥ 0 fails: smallest eigenvalue {ric_f_min:e}")));
    }
    let expected = src.eval(sample.potential);
    if (wc.drift_laplacian_f - expected).abs() > tol * expected.abs().max(1.0) {
        return Err(Error::hypothesis(format!(
            "Δ_f f = c₁exp(c₂f) fails: {:e} vs {expected:e}",
            wc.drift_laplacian_f
        )));
    }

    let rescaled = rescale_triple(sample, spec)?;
    let tilde = weighted_tensors(&rescaled, spec.weight())?.bakry_emery;
    let inv_d = 1.0 / spec.denominator();
    let coefficient = src.c1 * inv_d * ((src.c2 + 2.0 * inv_d) * sample.potential).exp();
    let margin = min_eigenvalue_relative(&(tilde - &rescaled.metric * coefficient), &rescaled.metric)?;
    Ok(CorollaryVerdict { margin, tol, pass: margin >= -tol })
}

/// `Δ̃_{f̃} f̃` predicted from the source term:
/// `(m̃c₁/(m̃+n−2))·exp((c₂ + 2/(m̃+n−2))f)`.
pub fn rescaled_source(spec: &RescaleSpec, src: &SourceTerm, f: f64) -> f64 {
    let inv_d = 1.0 / spec.denominator();
    spec.m_tilde * src.c1 * inv_d * ((src.c2 + 2.0 * inv_d) * f).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::*;

    fn spec(m: f64, n: usize) -> RescaleSpec {
        RescaleSpec::new(Weight::Finite(m), n).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(RescaleSpec::new(Weight::Infinite, 3).is_err());
        assert!(matches!(RescaleSpec::new(Weight::Finite(0.5), 1), Err(Error::Domain(_))));
        let s = spec(2.0, 3);
        assert!((s.metric_exponent() + 2.0 / 3.0).abs() < 1e-15);
        assert!((s.potential_factor() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_potential_scales_uniformly() {
        let chart = ModelChart::new(RandomAnalyticMetric::generate(3, 4), ConstantField { dim: 3, value: 0.8 });
        let s = chart.sample(&[0.1, 0.2, 0.3]);
        let sp = spec(5.0, 3);
        let t = rescale_triple(&s, &sp).unwrap();
        let k = (-2.0 * 0.8 / 6.0f64).exp();
        assert!((&t.metric - &s.metric * k).amax() < 1e-15);
        assert!((t.metric_d1.max_abs() - k * s.metric_d1.max_abs()).abs() < 1e-15);
        assert!((t.metric_d2.max_abs() - k * s.metric_d2.max_abs()).abs() < 1e-15);
        assert!((t.potential - 5.0 * 0.8 / 6.0).abs() < 1e-15);
        let res = change_identity_residual(&s, &sp).unwrap();
        assert!(res.amax() < 1e-13, "{}", res.amax());
    }

    #[test]
    fn large_m_tilde_limit_is_identity() {
        let chart = ModelChart::new(RandomAnalyticMetric::generate(2, 1), RandomTrigPotential::generate(2, 1));
        let s = chart.sample(&[0.3, 0.4]);
        let t = rescale_triple(&s, &spec(1e12, 2)).unwrap();
        assert!((&t.metric - &s.metric).amax() < 1e-10);
        assert!((t.metric_d2.max_abs() - s.metric_d2.max_abs()).abs() < 1e-10);
        assert!((t.potential - s.potential).abs() < 1e-10);
        assert!((&t.potential_d2 - &s.potential_d2).amax() < 1e-10);
    }

    #[test]
    fn chain_rule_matches_differenced_rescaled_chart() {
        let chart = ModelChart::new(RandomAnalyticMetric::generate(3, 8), RandomTrigPotential::generate(3, 8));
        let x = [0.2, -0.3, 0.6];
        let sp = spec(4.0, 3);
        let exact = rescale_triple(&chart.sample(&x), &sp).unwrap();
        let approx = sample_by_differences(&RescaledChart { chart: &chart, spec: sp }, &x, 1e-4);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((exact.metric_d1[(i, j, k)] - approx.metric_d1[(i, j, k)]).abs() < 1e-7);
                    for l in 0..3 {
                        assert!((exact.metric_d2[(i, j, k, l)] - approx.metric_d2[(i, j, k, l)]).abs() < 1e-5);
                    }
                }
            }
        }
    }

    #[test]
    fn constant_u_has_zero_laplacian_residual() {
        let chart = ModelChart::new(RandomAnalyticMetric::generate(3, 2), RandomTrigPotential::generate(3, 2));
        let s = chart.sample(&[0.5, 0.1, -0.2]);
        let r = laplacian_identity_residual(&s, &spec(3.0, 3), &ScalarJet::constant(3, 4.2)).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn corollary_collapses_to_ricci_for_zero_potential() {
        let chart = ModelChart::new(RoundSphere { dim: 2 }, ConstantField::zero(2));
        let s = chart.sample(&[1.0, 0.5]);
        let v = corollary_lower_bound(&s, &spec(3.0, 2), &SourceTerm { c1: 0.0, c2: 0.0 }, EXACT_TOL).unwrap();
        assert!((v.margin - 1.0).abs() < 1e-13);
        assert!(v.pass);
    }

    #[test]
    fn corollary_gates_on_hypotheses() {
        let chart = ModelChart::new(HyperbolicHalfSpace { dim: 2 }, ConstantField::zero(2));
        let s = chart.sample(&[0.0, 1.0]);
        let err = corollary_lower_bound(&s, &spec(3.0, 2), &SourceTerm { c1: 0.0, c2: 0.0 }, EXACT_TOL);
        assert!(matches!(err, Err(Error::HypothesisViolated(_))));

        let flat = ModelChart::new(Euclidean { dim: 2 }, Quadratic::gaussian(2));
        let s = flat.sample(&[0.1, 0.2]);
        // Δ_f f = 2 − 0.05, so c₁ = 1 is wrong
        let err = corollary_lower_bound(&s, &spec(3.0, 2), &SourceTerm { c1: 1.0, c2: 0.0 }, EXACT_TOL);
        assert!(matches!(err, Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn rescaled_source_matches_drift_laplacian_of_rescaled_potential() {
        let chart = ModelChart::new(Euclidean { dim: 3 }, Quadratic::gaussian(3));
        let x = [0.3, 0.2, -0.4];
        let s = chart.sample(&x);
        let sp = spec(7.0, 3);
        let f = s.potential;
        let src = SourceTerm { c1: 3.0 - (0.09 + 0.04 + 0.16), c2: 0.0 };
        let t = rescale_triple(&s, &sp).unwrap();
        let lhs = drift_laplacian_of(&t, &t.potential_jet()).unwrap();
        assert!((lhs - rescaled_source(&sp, &src, f)).abs() < 1e-13);
    }
}
