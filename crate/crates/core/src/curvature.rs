//! Riemannian and Bakry-Émery curvature of a chart sample, and the weighted
//! Bochner identity.
//!
//! Everything is expressed in the coordinate frame; indices are raised with
//! the inverse metric explicitly. The inverse comes from a Cholesky
//! factorization, so a degenerate metric is reported as an error instead of
//! propagating NaNs.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::chart::{ChartSample, ExactChart, ScalarField, ScalarJet};
use crate::error::{Error, Result};
use crate::tensor::Tensor3;
use crate::weight::Weight;

/// Christoffel symbols `Γ^k_ij`, stored as `christoffel[(k, i, j)]`, plus Ricci
/// and scalar curvature.
#[derive(Debug, Clone)]
pub struct Curvature {
    pub metric_inverse: DMatrix<f64>,
    pub christoffel: Tensor3,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

#[derive(Debug, Clone)]
pub struct WeightedCurvature {
    pub metric_inverse: DMatrix<f64>,
    pub christoffel: Tensor3,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    pub hess_f: DMatrix<f64>,
    pub laplacian_f: f64,
    pub drift_laplacian_f: f64,
    /// `|∇f|²_g`
    pub grad_f_sq: f64,
    /// `Ric + ∇²f − (1/m) df⊗df`
    pub bakry_emery: DMatrix<f64>,
}

fn factor(g: &DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(g.clone()).ok_or_else(|| Error::NotPositiveDefinite {
        eigenvalue: g.clone().symmetric_eigenvalues().min(),
    })
}

/// Inverse of a symmetric positive-definite matrix.
pub fn metric_inverse(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(factor(g)?.inverse())
}

/// Smallest eigenvalue of the symmetric form `t` measured against the metric
/// `g`, i.e. of `L⁻¹ t L⁻ᵀ` with `g = L Lᵀ`. This is the largest `c` with `t ≥ c·g`.
pub fn min_eigenvalue_relative(t: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<f64> {
    let l = factor(g)?.l();
    let l_inv = l
        .try_inverse()
        .ok_or_else(|| Error::domain("Cholesky factor not invertible"))?;
    let mut m = &l_inv * t * l_inv.transpose();
    m = (&m + m.transpose()) * 0.5;
    Ok(m.symmetric_eigenvalues().min())
}

/// Christoffel symbols, Ricci tensor and scalar curvature.
pub fn curvature(sample: &ChartSample) -> Result<Curvature> {
    let n = sample.dim();
    let ginv = metric_inverse(&sample.metric)?;
    let d1 = &sample.metric_d1;
    let d2 = &sample.metric_d2;

    // Γ_{lij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let lower = Tensor3::from_fn(n, |l, i, j| 0.5 * (d1[(j, l, i)] + d1[(i, l, j)] - d1[(i, j, l)]));
    let gamma = Tensor3::from_fn(n, |k, i, j| (0..n).map(|l| ginv[(k, l)] * lower[(l, i, j)]).sum());

    // ∂_m Γ^k_ij = −g^{ka} ∂_m g_ab Γ^b_ij + g^{kl} ∂_m Γ_{lij}
    let mut dgamma = vec![Tensor3::zeros(n); n];
    for (m, dg) in dgamma.iter_mut().enumerate() {
        let dlower = Tensor3::from_fn(n, |l, i, j| {
            0.5 * (d2[(j, l, i, m)] + d2[(i, l, j, m)] - d2[(i, j, l, m)])
        });
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = 0.0;
                    for a in 0..n {
                        let mut t = 0.0;
                        for b in 0..n {
                            t += d1[(a, b, m)] * gamma[(b, i, j)];
                        }
                        v += ginv[(k, a)] * (dlower[(a, i, j)] - t);
                    }
                    dg[(k, i, j)] = v;
                }
            }
        }
    }

    // R_ij = ∂_a Γ^a_ij − ∂_j Γ^a_ai + Γ^a_ab Γ^b_ij − Γ^a_jb Γ^b_ai
    let mut ricci = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut v = 0.0;
            for a in 0..n {
                v += dgamma[a][(a, i, j)] - dgamma[j][(a, a, i)];
                for b in 0..n {
                    v += gamma[(a, a, b)] * gamma[(b, i, j)] - gamma[(a, j, b)] * gamma[(b, a, i)];
                }
            }
            ricci[(i, j)] = v;
        }
    }
    let ricci = (&ricci + ricci.transpose()) * 0.5;
    let scalar = ginv.component_mul(&ricci).sum();

    Ok(Curvature { metric_inverse: ginv, christoffel: gamma, ricci, scalar })
}

/// Covariant Hessian `∂_i∂_j u − Γ^k_ij ∂_k u`.
pub fn covariant_hessian(christoffel: &Tensor3, u: &ScalarJet) -> DMatrix<f64> {
    let n = u.grad.len();
    DMatrix::from_fn(n, n, |i, j| {
        u.hess[(i, j)] - (0..n).map(|k| christoffel[(k, i, j)] * u.grad[k]).sum::<f64>()
    })
}

/// `Δ_f u = Δu − ⟨∇f, ∇u⟩`.
pub fn drift_laplacian(
    metric_inverse: &DMatrix<f64>,
    christoffel: &Tensor3,
    grad_f: &DVector<f64>,
    u: &ScalarJet,
) -> f64 {
    let hess = covariant_hessian(christoffel, u);
    metric_inverse.component_mul(&hess).sum() - inner(metric_inverse, grad_f, &u.grad)
}

/// `g^{ij} a_i b_j`
pub fn inner(metric_inverse: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(&(metric_inverse * b))
}

/// All weighted curvature quantities at a sample.
pub fn weighted_tensors(sample: &ChartSample, m: Weight) -> Result<WeightedCurvature> {
    let Curvature { metric_inverse, christoffel, ricci, scalar } = curvature(sample)?;
    let f = sample.potential_jet();
    let hess_f = covariant_hessian(&christoffel, &f);
    let laplacian_f = metric_inverse.component_mul(&hess_f).sum();
    let grad_f_sq = inner(&metric_inverse, &f.grad, &f.grad);
    let drift_laplacian_f = laplacian_f - grad_f_sq;
    let df_df = &f.grad * f.grad.transpose();
    let bakry_emery = &ricci + &hess_f - df_df * m.reciprocal();
    Ok(WeightedCurvature {
        metric_inverse,
        christoffel,
        ricci,
        scalar,
        hess_f,
        laplacian_f,
        drift_laplacian_f,
        grad_f_sq,
        bakry_emery,
    })
}

/// Attached to a Bochner evaluation whose step is small enough that rounding
/// in the second differences may dominate truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningWarning {
    pub step: f64,
    /// Estimated rounding error of the differenced terms.
    pub roundoff_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BochnerResult {
    pub residual: f64,
    pub warning: Option<ConditioningWarning>,
}

const ROUNDOFF_WARNING_LEVEL: f64 = 1e-8;

/// Residual of the weighted Bochner formula
///
/// `½Δ_f|∇u|² − |∇²u|² − ⟨∇u, ∇Δ_f u⟩ − Ric_f^m(∇u,∇u) − (1/m)⟨∇f,∇u⟩²`
///
/// at `x`. The chart and `u` supply exact 2-jets at every point; the third
/// and fourth derivatives hidden in `Δ_f|∇u|²` and `∇Δ_f u` are taken by
/// central differences of step `h`, so the residual is `O(h²)`.
pub fn bochner_residual(
    chart: &dyn ExactChart,
    u: &dyn ScalarField,
    x: &[f64],
    m: Weight,
    h: f64,
) -> Result<BochnerResult> {
    let n = chart.dim();
    if u.dim() != n || x.len() != n {
        return Err(Error::domain("dimension mismatch between chart, test function and point"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain(format!("finite-difference step must be positive, got {h}")));
    }

    // q = |∇u|², p = Δ_f u, both evaluated exactly from 2-jets
    let fields = |y: &[f64]| -> Result<(f64, f64)> {
        let s = chart.sample(y);
        let c = curvature(&s)?;
        let uj = u.jet(y);
        let q = inner(&c.metric_inverse, &uj.grad, &uj.grad);
        let p = drift_laplacian(&c.metric_inverse, &c.christoffel, &s.potential_d1, &uj);
        Ok((q, p))
    };
    let at = |moves: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(k, d) in moves {
            y[k] += d;
        }
        fields(&y)
    };

    let (q0, _) = fields(x)?;
    let mut q_scale = q0.abs();
    let mut grad_q = DVector::zeros(n);
    let mut grad_p = DVector::zeros(n);
    let mut hess_q = DMatrix::zeros(n, n);
    for k in 0..n {
        let (qp, pp) = at(&[(k, h)])?;
        let (qm, pm) = at(&[(k, -h)])?;
        q_scale = q_scale.max(qp.abs()).max(qm.abs());
        grad_q[k] = (qp - qm) / (2.0 * h);
        grad_p[k] = (pp - pm) / (2.0 * h);
        hess_q[(k, k)] = (qp - 2.0 * q0 + qm) / (h * h);
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let v = (at(&[(k, h), (l, h)])?.0 - at(&[(k, h), (l, -h)])?.0 - at(&[(k, -h), (l, h)])?.0
                + at(&[(k, -h), (l, -h)])?.0)
                / (4.0 * h * h);
            hess_q[(k, l)] = v;
            hess_q[(l, k)] = v;
        }
    }

    let sample = chart.sample(x);
    let wc = weighted_tensors(&sample, m)?;
    let ginv = &wc.metric_inverse;
    let uj = u.jet(x);
    let q_jet = ScalarJet { value: q0, grad: grad_q, hess: hess_q };
    let half_drift_q = 0.5 * drift_laplacian(ginv, &wc.christoffel, &sample.potential_d1, &q_jet);

    let hess_u = covariant_hessian(&wc.christoffel, &uj);
    let hess_u_raised = ginv * &hess_u * ginv;
    let hess_norm_sq = hess_u_raised.component_mul(&hess_u).sum();
    let grad_u_up = ginv * &uj.grad;
    let ric_term = grad_u_up.dot(&(&wc.bakry_emery * &grad_u_up));
    let f_dot_u = inner(ginv, &sample.potential_d1, &uj.grad);
    let residual = half_drift_q
        - hess_norm_sq
        - inner(ginv, &uj.grad, &grad_p)
        - ric_term
        - m.reciprocal() * f_dot_u * f_dot_u;

    let roundoff_estimate = 4.0 * f64::EPSILON * q_scale.max(1.0) / (h * h);
    let warning = (roundoff_estimate > ROUNDOFF_WARNING_LEVEL)
        .then_some(ConditioningWarning { step: h, roundoff_estimate });
    Ok(BochnerResult { residual, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::*;
    use crate::tensor::Tensor4;
    use std::f64::consts::PI;

    #[test]
    fn flat_space_is_ricci_flat() {
        let chart = ModelChart::new(Euclidean { dim: 3 }, ConstantField::zero(3));
        let c = curvature(&chart.sample(&[0.1, 0.2, 0.3])).unwrap();
        assert_eq!(c.ricci.amax(), 0.0);
        assert_eq!(c.scalar, 0.0);
    }

    #[test]
    fn unit_sphere_polar_chart() {
        let chart = ModelChart::new(RoundSphere { dim: 2 }, ConstantField::zero(2));
        let s = chart.sample(&[PI / 3.0, 0.4]);
        let c = curvature(&s).unwrap();
        assert!((&c.ricci - &s.metric).amax() < 1e-14);
        assert!((c.scalar - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hyperbolic_plane() {
        let chart = ModelChart::new(HyperbolicHalfSpace { dim: 2 }, ConstantField::zero(2));
        let s = chart.sample(&[0.0, 1.0]);
        let c = curvature(&s).unwrap();
        assert!((&c.ricci + &s.metric).amax() < 1e-14);
        assert!((c.scalar + 2.0).abs() < 1e-14);
    }

    #[test]
    fn constant_curvature_models_in_higher_dimension() {
        let sphere = ModelChart::new(RoundSphere { dim: 4 }, ConstantField::zero(4));
        let s = sphere.sample(&[0.7, 1.2, 2.0, 0.3]);
        let c = curvature(&s).unwrap();
        assert!((&c.ricci - &s.metric * 3.0).amax() < 1e-13);
        let hyp = ModelChart::new(HyperbolicHalfSpace { dim: 3 }, ConstantField::zero(3));
        let s = hyp.sample(&[0.5, -0.3, 0.8]);
        let c = curvature(&s).unwrap();
        assert!((&c.ricci + &s.metric * 2.0).amax() < 1e-12);
    }

    #[test]
    fn degenerate_metric_reports_eigenvalue() {
        let mut g = DMatrix::identity(2, 2);
        g[(1, 1)] = -0.5;
        let s = ChartSample::from_metric(DVector::zeros(2), g, Tensor3::zeros(2), Tensor4::zeros(2));
        match curvature(&s) {
            Err(Error::NotPositiveDefinite { eigenvalue }) => assert_eq!(eigenvalue, -0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vanishing_potential_gives_plain_ricci() {
        let chart = ModelChart::new(RandomAnalyticMetric::generate(3, 3), ConstantField::zero(3));
        let w = weighted_tensors(&chart.sample(&[0.2, 0.1, -0.4]), Weight::Finite(3.0)).unwrap();
        assert_eq!(w.bakry_emery, w.ricci);
        assert_eq!(w.drift_laplacian_f, w.laplacian_f);
    }

    #[test]
    fn gaussian_soliton() {
        let chart = ModelChart::new(Euclidean { dim: 4 }, Quadratic::gaussian(4));
        let w = weighted_tensors(&chart.sample(&[0.3, -1.0, 0.5, 2.0]), Weight::Infinite).unwrap();
        assert!((w.bakry_emery - DMatrix::identity(4, 4)).amax() < 1e-15);
    }

    #[test]
    fn logcosh_line_is_quasi_einstein() {
        // f'' − f'²/m = −m c² for f = −m log cosh(ct); here m = 2, c = 1
        let chart = ModelChart::new(Euclidean { dim: 1 }, LogCosh { dim: 1, axis: 0, amplitude: -2.0, rate: 1.0 });
        let w = weighted_tensors(&chart.sample(&[0.7]), Weight::Finite(2.0)).unwrap();
        assert!((w.bakry_emery[(0, 0)] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn trace_identities_hold_exactly() {
        let chart = ModelChart::new(RandomAnalyticMetric::generate(3, 11), RandomTrigPotential::generate(3, 11));
        let s = chart.sample(&[0.4, -0.7, 0.2]);
        let w = weighted_tensors(&s, Weight::Finite(2.5)).unwrap();
        let trace_hess = w.metric_inverse.component_mul(&w.hess_f).sum();
        assert_eq!(trace_hess, w.laplacian_f);
        assert_eq!(w.drift_laplacian_f + w.grad_f_sq, w.laplacian_f);
        assert!((w.metric_inverse.component_mul(&w.ricci).sum() - w.scalar).abs() < 1e-14);
    }

    #[test]
    fn bochner_flat_quadratic_is_exact() {
        let chart = ModelChart::new(Euclidean { dim: 3 }, Quadratic::random(3, 1));
        let u = Quadratic::random(3, 2);
        let r = bochner_residual(&chart, &u, &[0.2, 0.5, -0.1], Weight::Finite(3.0), 1e-3).unwrap();
        assert!(r.residual.abs() < 1e-8, "{}", r.residual);
        assert!(r.warning.is_none());
    }

    #[test]
    fn bochner_warns_for_tiny_steps() {
        let chart = ModelChart::new(Euclidean { dim: 2 }, ConstantField::zero(2));
        let u = Quadratic::random(2, 5);
        let r = bochner_residual(&chart, &u, &[0.1, 0.1], Weight::Infinite, 1e-7).unwrap();
        assert!(r.warning.is_some());
    }

    #[test]
    fn bochner_rejects_bad_step() {
        let chart = ModelChart::new(Euclidean { dim: 2 }, ConstantField::zero(2));
        let u = Quadratic::random(2, 5);
        assert!(bochner_residual(&chart, &u, &[0.1, 0.1], Weight::Infinite, 0.0).is_err());
    }

    #[test]
    fn relative_eigenvalue_of_metric_is_one() {
        let g = RandomAnalyticMetric::generate(3, 9).jet(&[0.1, 0.2, 0.3]).0;
        assert!((min_eigenvalue_relative(&(&g * 2.5), &g).unwrap() - 2.5).abs() < 1e-13);
    }
}
