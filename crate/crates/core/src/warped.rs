//! Warped products `ḡ = g ⊕ exp(−2f/m)·h` over a base chart, and the
//! quasi-Einstein characterization of their Einstein condition.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chart::ChartSample;
use crate::curvature::{curvature, weighted_tensors};
use crate::error::{Error, Result};
use crate::models::{
    Euclidean, GENERIC_ANGLE, HyperbolicHalfSpace, LogCosh, MetricField, MetricJet, ModelChart, RoundSphere,
    ScaledMetric,
};
use crate::tensor::{Tensor3, Tensor4};
use crate::weight::Weight;

impl<M: MetricField + ?Sized> MetricField for Arc<M> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn jet(&self, x: &[f64]) -> MetricJet {
        (**self).jet(x)
    }
}

/// Tolerance, relative to the size of `h`, for the fiber's Einstein check.
const FIBER_EINSTEIN_TOL: f64 = 1e-10;

/// An Einstein fiber `(N^m, h)` with `Ric(h) = μ_h·h`, evaluated at one chart point.
#[derive(Clone)]
pub struct FiberSpec {
    pub dim: usize,
    pub einstein_constant: f64,
    pub metric: Arc<dyn MetricField>,
    pub point: Vec<f64>,
}

impl std::fmt::Debug for FiberSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiberSpec")
            .field("dim", &self.dim)
            .field("einstein_constant", &self.einstein_constant)
            .field("point", &self.point)
            .finish()
    }
}

impl FiberSpec {
    /// Hyperbolic space `H^m`, `μ_h = −(m−1)`.
    pub fn hyperbolic(m: usize) -> Self {
        let mut point = vec![0.2; m];
        point[m - 1] = 1.3;
        Self { dim: m, einstein_constant: -(m as f64 - 1.0), metric: Arc::new(HyperbolicHalfSpace { dim: m }), point }
    }

    /// Unit round sphere `S^m`, `μ_h = m−1`.
    pub fn sphere(m: usize) -> Self {
        Self {
            dim: m,
            einstein_constant: m as f64 - 1.0,
            metric: Arc::new(RoundSphere { dim: m }),
            point: vec![GENERIC_ANGLE; m],
        }
    }

    /// Flat torus chart, `μ_h = 0`.
    pub fn flat(m: usize) -> Self {
        Self { dim: m, einstein_constant: 0.0, metric: Arc::new(Euclidean { dim: m }), point: vec![0.3; m] }
    }

    /// `k·h`, whose Einstein constant is `μ_h/k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            dim: self.dim,
            einstein_constant: self.einstein_constant / k,
            metric: Arc::new(ScaledMetric { inner: self.metric.clone(), factor: k }),
            point: self.point.clone(),
        }
    }

    /// Checks `Ric(h) = μ_h·h` at the fiber point.
    pub fn check_einstein(&self) -> Result<()> {
        let (h, d1, d2) = self.metric.jet(&self.point);
        let sample = ChartSample::from_metric(DVector::from_column_slice(&self.point), h, d1, d2);
        let ric = curvature(&sample)?.ricci;
        let defect = (ric - &sample.metric * self.einstein_constant).amax();
        if defect > FIBER_EINSTEIN_TOL * (1.0 + sample.metric.amax()) {
            return Err(Error::domain(format!(
                "fiber is not Einstein with constant {}: defect {defect:e}",
                self.einstein_constant
            )));
        }
        Ok(())
    }

    /// The fiber dimension is the weight `m` of the base equations.
    pub fn check_weight(&self, m: Weight) -> Result<()> {
        match m {
            Weight::Finite(v) if v == self.dim as f64 => Ok(()),
            other => Err(Error::domain(format!("weight {other} does not match fiber dimension {}", self.dim))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WarpedSample {
    pub base: ChartSample,
    pub fiber: FiberSpec,
    /// `g ⊕ exp(−2f/m)·h` on the product chart, with zero potential.
    pub total: ChartSample,
}

/// Builds the product-chart sample. Derivatives of the fiber block
/// `ψ·h`, `ψ = exp(−2f/m)`, come from the product and chain rules.
pub fn assemble(base: &ChartSample, fiber: &FiberSpec) -> Result<WarpedSample> {
    fiber.check_einstein()?;
    let n = base.dim();
    let m = fiber.dim;
    let total_dim = n + m;
    let (h, hd1, hd2) = fiber.metric.jet(&fiber.point);

    let f1 = &base.potential_d1;
    let f2 = &base.potential_d2;
    let mf = m as f64;
    let psi = (-2.0 * base.potential / mf).exp();
    let dpsi = f1 * (-2.0 / mf * psi);
    let ddpsi = DMatrix::from_fn(n, n, |k, l| psi * (4.0 / (mf * mf) * f1[k] * f1[l] - 2.0 / mf * f2[(k, l)]));

    let mut metric = DMatrix::zeros(total_dim, total_dim);
    let mut d1 = Tensor3::zeros(total_dim);
    let mut d2 = Tensor4::zeros(total_dim);
    for i in 0..n {
        for j in 0..n {
            metric[(i, j)] = base.metric[(i, j)];
            for k in 0..n {
                d1[(i, j, k)] = base.metric_d1[(i, j, k)];
                for l in 0..n {
                    d2[(i, j, k, l)] = base.metric_d2[(i, j, k, l)];
                }
            }
        }
    }
    for a in 0..m {
        for b in 0..m {
            let (i, j) = (n + a, n + b);
            metric[(i, j)] = psi * h[(a, b)];
            for k in 0..n {
                d1[(i, j, k)] = dpsi[k] * h[(a, b)];
                for l in 0..n {
                    d2[(i, j, k, l)] = ddpsi[(k, l)] * h[(a, b)];
                }
                for c in 0..m {
                    d2[(i, j, k, n + c)] = dpsi[k] * hd1[(a, b, c)];
                    d2[(i, j, n + c, k)] = dpsi[k] * hd1[(a, b, c)];
                }
            }
            for c in 0..m {
                d1[(i, j, n + c)] = psi * hd1[(a, b, c)];
                for e in 0..m {
                    d2[(i, j, n + c, n + e)] = psi * hd2[(a, b, c, e)];
                }
            }
        }
    }
    let point = DVector::from_iterator(total_dim, base.point.iter().chain(fiber.point.iter()).copied());
    let total = ChartSample::from_metric(point, metric, d1, d2);
    Ok(WarpedSample { base: base.clone(), fiber: fiber.clone(), total })
}

/// `Ric(ḡ) − λ·ḡ` on the product chart.
pub fn einstein_residual(ws: &WarpedSample, lambda: f64) -> Result<DMatrix<f64>> {
    let ric = curvature(&ws.total)?.ricci;
    Ok(ric - &ws.total.metric * lambda)
}

/// `μ(x) = −(Δ_f f − mλ)·exp(−2f/m)/m`, constant whenever `Ric_f^m = λg`
/// holds on a connected region.
pub fn mu_field(base: &ChartSample, m: Weight, lambda: f64) -> Result<f64> {
    let mv = m
        .value()
        .ok_or_else(|| Error::contract("the warped-product constant needs a finite weight"))?;
    let wc = weighted_tensors(base, m)?;
    Ok(-(wc.drift_laplacian_f - mv * lambda) * (-2.0 * base.potential / mv).exp() / mv)
}

/// Both sides of the Einstein ⇔ quasi-Einstein equivalence at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equivalence {
    /// Sup-norm of `Ric(ḡ) − λḡ`.
    pub total_residual: f64,
    /// Sup-norm of `Ric_f^m(g) − λg`.
    pub base_residual: f64,
    pub mu: f64,
    pub fiber_constant: f64,
}

impl Equivalence {
    pub fn total_is_einstein(&self, tol: f64) -> bool {
        self.total_residual <= tol
    }

    pub fn base_and_fiber_conditions_hold(&self, tol: f64) -> bool {
        self.base_residual <= tol && (self.mu - self.fiber_constant).abs() <= tol
    }
}

pub fn equivalence(base: &ChartSample, fiber: &FiberSpec, lambda: f64) -> Result<Equivalence> {
    let m = Weight::finite(fiber.dim as f64)?;
    let ws = assemble(base, fiber)?;
    let total_residual = einstein_residual(&ws, lambda)?.amax();
    let be = weighted_tensors(base, m)?.bakry_emery;
    let base_residual = (be - &base.metric * lambda).amax();
    Ok(Equivalence { total_residual, base_residual, mu: mu_field(base, m, lambda)?, fiber_constant: fiber.einstein_constant })
}

/// The line `(ℝ, dt²)` with potential `f = −m log cosh(ct)`, which satisfies
/// `Ric_f^m = −mc²·g` and has `μ = −(m−1)c²`.
pub fn log_cosh_line(m: f64, c: f64) -> ModelChart<Euclidean, LogCosh> {
    ModelChart::new(Euclidean { dim: 1 }, LogCosh { dim: 1, axis: 0, amplitude: -m, rate: c })
}
