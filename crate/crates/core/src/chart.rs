//! Chart samples: a metric and a potential together with their derivatives
//! up to second order at one point of a coordinate chart.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tensor::{Tensor3, Tensor4};

/// Value, gradient and coordinate Hessian of a scalar function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl ScalarJet {
    pub fn zero(n: usize) -> Self {
        Self { value: 0.0, grad: DVector::zeros(n), hess: DMatrix::zeros(n, n) }
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self { value, ..Self::zero(n) }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { value: self.value * s, grad: &self.grad * s, hess: &self.hess * s }
    }
}

/// Metric and potential 2-jets at one chart point.
///
/// Index conventions: `metric_d1[(i, j, k)] = ∂_k g_ij` and
/// `metric_d2[(i, j, k, l)] = ∂_l ∂_k g_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSample {
    pub point: DVector<f64>,
    pub metric: DMatrix<f64>,
    pub metric_d1: Tensor3,
    pub metric_d2: Tensor4,
    pub potential: f64,
    pub potential_d1: DVector<f64>,
    pub potential_d2: DMatrix<f64>,
}

impl ChartSample {
    /// A sample with vanishing potential.
    pub fn from_metric(point: DVector<f64>, metric: DMatrix<f64>, d1: Tensor3, d2: Tensor4) -> Self {
        let n = metric.nrows();
        Self {
            point,
            metric,
            metric_d1: d1,
            metric_d2: d2,
            potential: 0.0,
            potential_d1: DVector::zeros(n),
            potential_d2: DMatrix::zeros(n, n),
        }
    }

    pub fn with_potential(mut self, jet: ScalarJet) -> Self {
        self.potential = jet.value;
        self.potential_d1 = jet.grad;
        self.potential_d2 = jet.hess;
        self
    }

    pub fn dim(&self) -> usize {
        self.metric.nrows()
    }

    pub fn potential_jet(&self) -> ScalarJet {
        ScalarJet {
            value: self.potential,
            grad: self.potential_d1.clone(),
            hess: self.potential_d2.clone(),
        }
    }

    /// Checks shapes and the index symmetries of every array, to a relative
    /// tolerance `tol`. Positive definiteness is left to the curvature code.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::domain("chart dimension must be at least 1"));
        }
        let shapes_ok = self.metric.ncols() == n
            && self.point.len() == n
            && self.metric_d1.dim() == n
            && self.metric_d2.dim() == n
            && self.potential_d1.len() == n
            && self.potential_d2.nrows() == n
            && self.potential_d2.ncols() == n;
        if !shapes_ok {
            return Err(Error::domain(format!("inconsistent array shapes for dimension {n}")));
        }
        let scale = 1.0 + self.metric.amax() + self.metric_d1.max_abs() + self.metric_d2.max_abs();
        let bad = |a: f64, b: f64| (a - b).abs() > tol * scale;
        for i in 0..n {
            for j in 0..n {
                if bad(self.metric[(i, j)], self.metric[(j, i)]) {
                    return Err(Error::domain("metric is not symmetric"));
                }
                if bad(self.potential_d2[(i, j)], self.potential_d2[(j, i)]) {
                    return Err(Error::domain("potential Hessian is not symmetric"));
                }
                for k in 0..n {
                    if bad(self.metric_d1[(i, j, k)], self.metric_d1[(j, i, k)]) {
                        return Err(Error::domain("metric first derivatives not symmetric in (i,j)"));
                    }
                    for l in 0..n {
                        let v = self.metric_d2[(i, j, k, l)];
                        if bad(v, self.metric_d2[(j, i, k, l)]) || bad(v, self.metric_d2[(i, j, l, k)]) {
                            return Err(Error::domain("metric second derivatives not symmetric"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A chart that can be evaluated pointwise.
pub trait Chart: Send + Sync {
    fn dim(&self) -> usize;
    fn metric_at(&self, x: &[f64]) -> DMatrix<f64>;
    fn potential_at(&self, x: &[f64]) -> f64;
}

/// A chart with closed-form derivatives.
pub trait ExactChart: Chart {
    fn sample(&self, x: &[f64]) -> ChartSample;
}

/// A scalar test function with closed-form derivatives.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;
    fn jet(&self, x: &[f64]) -> ScalarJet;
    fn value(&self, x: &[f64]) -> f64 {
        self.jet(x).value
    }
}

/// Default finite-difference step, relative to unit coordinate scale.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Samples a chart with second-order central differences of step `h`.
pub fn sample_by_differences(chart: &dyn Chart, x: &[f64], h: f64) -> ChartSample {
    let n = chart.dim();
    let shifted = |moves: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(k, d) in moves {
            y[k] += d;
        }
        y
    };
    let g0 = chart.metric_at(x);
    let f0 = chart.potential_at(x);

    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for k in 0..n {
        let yp = shifted(&[(k, h)]);
        let ym = shifted(&[(k, -h)]);
        plus.push((chart.metric_at(&yp), chart.potential_at(&yp)));
        minus.push((chart.metric_at(&ym), chart.potential_at(&ym)));
    }

    let mut d1 = Tensor3::zeros(n);
    let mut d2 = Tensor4::zeros(n);
    let mut fd1 = DVector::zeros(n);
    let mut fd2 = DMatrix::zeros(n, n);
    for k in 0..n {
        fd1[k] = (plus[k].1 - minus[k].1) / (2.0 * h);
        fd2[(k, k)] = (plus[k].1 - 2.0 * f0 + minus[k].1) / (h * h);
        for i in 0..n {
            for j in 0..n {
                d1[(i, j, k)] = (plus[k].0[(i, j)] - minus[k].0[(i, j)]) / (2.0 * h);
                d2[(i, j, k, k)] = (plus[k].0[(i, j)] - 2.0 * g0[(i, j)] + minus[k].0[(i, j)]) / (h * h);
            }
        }
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let pp = shifted(&[(k, h), (l, h)]);
            let pm = shifted(&[(k, h), (l, -h)]);
            let mp = shifted(&[(k, -h), (l, h)]);
            let mm = shifted(&[(k, -h), (l, -h)]);
            let (gpp, gpm, gmp, gmm) =
                (chart.metric_at(&pp), chart.metric_at(&pm), chart.metric_at(&mp), chart.metric_at(&mm));
            let cross = (chart.potential_at(&pp) - chart.potential_at(&pm) - chart.potential_at(&mp)
                + chart.potential_at(&mm))
                / (4.0 * h * h);
            fd2[(k, l)] = cross;
            fd2[(l, k)] = cross;
            for i in 0..n {
                for j in 0..n {
                    let v = (gpp[(i, j)] - gpm[(i, j)] - gmp[(i, j)] + gmm[(i, j)]) / (4.0 * h * h);
                    d2[(i, j, k, l)] = v;
                    d2[(i, j, l, k)] = v;
                }
            }
        }
    }

    ChartSample {
        point: DVector::from_column_slice(x),
        metric: g0,
        metric_d1: d1,
        metric_d2: d2,
        potential: f0,
        potential_d1: fd1,
        potential_d2: fd2,
    }
}
