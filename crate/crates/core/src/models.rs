//! Closed-form metrics, potentials and test functions used as chart data.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::{Chart, ChartSample, ExactChart, ScalarField, ScalarJet};
use crate::tensor::{Tensor3, Tensor4};

/// Metric 2-jet: `(g, ∂g, ∂∂g)` with the index conventions of [`ChartSample`].
pub type MetricJet = (DMatrix<f64>, Tensor3, Tensor4);

pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;
    fn jet(&self, x: &[f64]) -> MetricJet;
}

impl<M: MetricField + ?Sized> MetricField for Box<M> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn jet(&self, x: &[f64]) -> MetricJet {
        (**self).jet(x)
    }
}

impl<F: ScalarField + ?Sized> ScalarField for Box<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn jet(&self, x: &[f64]) -> ScalarJet {
        (**self).jet(x)
    }
}

/// A chart assembled from a metric field and a potential.
#[derive(Debug, Clone)]
pub struct ModelChart<M, F> {
    pub metric: M,
    pub potential: F,
}

impl<M: MetricField, F: ScalarField> ModelChart<M, F> {
    pub fn new(metric: M, potential: F) -> Self {
        debug_assert_eq!(metric.dim(), potential.dim());
        Self { metric, potential }
    }
}

impl<M: MetricField, F: ScalarField> Chart for ModelChart<M, F> {
    fn dim(&self) -> usize {
        self.metric.dim()
    }
    fn metric_at(&self, x: &[f64]) -> DMatrix<f64> {
        self.metric.jet(x).0
    }
    fn potential_at(&self, x: &[f64]) -> f64 {
        self.potential.value(x)
    }
}

impl<M: MetricField, F: ScalarField> ExactChart for ModelChart<M, F> {
    fn sample(&self, x: &[f64]) -> ChartSample {
        let (g, d1, d2) = self.metric.jet(x);
        ChartSample::from_metric(DVector::from_column_slice(x), g, d1, d2).with_potential(self.potential.jet(x))
    }
}

// ---------------------------------------------------------------------------
// Metrics

#[derive(Debug, Clone, Copy)]
pub struct Euclidean {
    pub dim: usize,
}

impl MetricField for Euclidean {
    fn dim(&self) -> usize {
        self.dim
    }
    fn jet(&self, _x: &[f64]) -> MetricJet {
        (DMatrix::identity(self.dim, self.dim), Tensor3::zeros(self.dim), Tensor4::zeros(self.dim))
    }
}

/// Products `s_a = ∏_{b<a} sin²θ_b` of the polar-coordinate round metric,
/// with first and second angle derivatives.
#[derive(Debug, Clone)]
pub struct SphereFactors {
    pub s: Vec<f64>,
    pub d1: Vec<Vec<f64>>,
    pub d2: Vec<Vec<Vec<f64>>>,
}

pub fn sphere_factors(angles: &[f64]) -> SphereFactors {
    let d = angles.len();
    // q = sin², q' = sin 2θ, q'' = 2 cos 2θ
    let q = |order: usize, t: f64| match order {
        0 => t.sin().powi(2),
        1 => (2.0 * t).sin(),
        _ => 2.0 * (2.0 * t).cos(),
    };
    let product = |a: usize, orders: &dyn Fn(usize) -> usize| -> f64 {
        (0..a).map(|b| q(orders(b), angles[b])).product()
    };
    let mut s = vec![0.0; d];
    let mut d1 = vec![vec![0.0; d]; d];
    let mut d2 = vec![vec![vec![0.0; d]; d]; d];
    for a in 0..d {
        s[a] = product(a, &|_| 0);
        for b in 0..a {
            d1[a][b] = product(a, &|c| usize::from(c == b));
            for c in 0..a {
                d2[a][b][c] = product(a, &|e| usize::from(e == b) + usize::from(e == c));
            }
        }
    }
    SphereFactors { s, d1, d2 }
}

/// Unit round sphere `S^dim` in polar coordinates, `g = diag(s_0, …, s_{dim-1})`.
#[derive(Debug, Clone, Copy)]
pub struct RoundSphere {
    pub dim: usize,
}

impl MetricField for RoundSphere {
    fn dim(&self) -> usize {
        self.dim
    }
    fn jet(&self, x: &[f64]) -> MetricJet {
        let n = self.dim;
        let sf = sphere_factors(x);
        let g = DMatrix::from_fn(n, n, |i, j| if i == j { sf.s[i] } else { 0.0 });
        let d1 = Tensor3::from_fn(n, |i, j, k| if i == j { sf.d1[i][k] } else { 0.0 });
        let d2 = Tensor4::from_fn(n, |i, j, k, l| if i == j { sf.d2[i][k][l] } else { 0.0 });
        (g, d1, d2)
    }
}

/// Upper half-space model `g = y⁻² δ` with `y` the last coordinate; sectional curvature −1.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicHalfSpace {
    pub dim: usize,
}

impl MetricField for HyperbolicHalfSpace {
    fn dim(&self) -> usize {
        self.dim
    }
    fn jet(&self, x: &[f64]) -> MetricJet {
        let n = self.dim;
        let last = n - 1;
        let y = x[last];
        let g = DMatrix::identity(n, n) / (y * y);
        let d1 = Tensor3::from_fn(n, |i, j, k| if i == j && k == last { -2.0 / y.powi(3) } else { 0.0 });
        let d2 = Tensor4::from_fn(n, |i, j, k, l| {
            if i == j && k == last && l == last {
                6.0 / y.powi(4)
            } else {
                0.0
            }
        });
        (g, d1, d2)
    }
}

/// A constant multiple `factor·h` of another metric.
#[derive(Debug, Clone)]
pub struct ScaledMetric<M> {
    pub inner: M,
    pub factor: f64,
}

impl<M: MetricField> MetricField for ScaledMetric<M> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn jet(&self, x: &[f64]) -> MetricJet {
        let (g, d1, d2) = self.inner.jet(x);
        (g * self.factor, d1.scale(self.factor), d2.scale(self.factor))
    }
}

/// `g(x) = I + Σ_p S_p sin(k_p·x + φ_p)` with small symmetric `S_p`, so the
/// metric stays positive definite everywhere.
#[derive(Debug, Clone)]
pub struct RandomAnalyticMetric {
    dim: usize,
    terms: Vec<(DMatrix<f64>, DVector<f64>, f64)>,
}

impl RandomAnalyticMetric {
    pub fn generate(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // spectral norm of each S_p is at most dim·amp, three terms in total
        let amp = 0.25 / (3.0 * dim as f64);
        let terms = (0..3)
            .map(|_| {
                let mut s = DMatrix::zeros(dim, dim);
                for i in 0..dim {
                    for j in i..dim {
                        let v = rng.gen_range(-amp..amp);
                        s[(i, j)] = v;
                        s[(j, i)] = v;
                    }
                }
                let k = DVector::from_fn(dim, |_, _| rng.gen_range(-3.0..3.0));
                (s, k, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        Self { dim, terms }
    }
}

impl MetricField for RandomAnalyticMetric {
    fn dim(&self) -> usize {
        self.dim
    }
    fn jet(&self, x: &[f64]) -> MetricJet {
        let n = self.dim;
        let mut g = DMatrix::identity(n, n);
        let mut d1 = Tensor3::zeros(n);
        let mut d2 = Tensor4::zeros(n);
        for (s, k, phase) in &self.terms {
            let arg = k.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + phase;
            let (sn, cs) = arg.sin_cos();
            for i in 0..n {
                for j in 0..n {
                    g[(i, j)] += s[(i, j)] * sn;
                    for a in 0..n {
                        d1[(i, j, a)] += s[(i, j)] * k[a] * cs;
                        for b in 0..n {
                            d2[(i, j, a, b)] -= s[(i, j)] * k[a] * k[b] * sn;
                        }
                    }
                }
            }
        }
        (g, d1, d2)
    }
}

// ---------------------------------------------------------------------------
// Scalar fields

#[derive(Debug, Clone, Copy)]
pub struct ConstantField {
    pub dim: usize,
    pub value: f64,
}

impl ConstantField {
    pub fn zero(dim: usize) -> Self {
        Self { dim, value: 0.0 }
    }
}

impl ScalarField for ConstantField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn jet(&self, _x: &[f64]) -> ScalarJet {
        ScalarJet::constant(self.dim, self.value)
    }
}

/// `u = ½ xᵀAx + b·x + c`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: f64,
}

impl Quadratic {
    /// `|x|²/2`, the Gaussian soliton potential.
    pub fn gaussian(dim: usize) -> Self {
        Self { a: DMatrix::identity(dim, dim), b: DVector::zeros(dim), c: 0.0 }
    }

    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = rng.gen_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let b = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        Self { a, b, c: rng.gen_range(-1.0..1.0) }
    }
}

impl ScalarField for Quadratic {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn jet(&self, x: &[f64]) -> ScalarJet {
        let x = DVector::from_column_slice(x);
        let ax = &self.a * &x;
        ScalarJet { value: 0.5 * x.dot(&ax) + self.b.dot(&x) + self.c, grad: ax + &self.b, hess: self.a.clone() }
    }
}

/// `amplitude · ln cosh(rate · x_axis)`; with amplitude `−m` and rate `c` this is
/// the one-dimensional quasi-Einstein potential `−m log cosh(ct)`.
#[derive(Debug, Clone, Copy)]
pub struct LogCosh {
    pub dim: usize,
    pub axis: usize,
    pub amplitude: f64,
    pub rate: f64,
}

impl ScalarField for LogCosh {
    fn dim(&self) -> usize {
        self.dim
    }
    fn jet(&self, x: &[f64]) -> ScalarJet {
        let t = self.rate * x[self.axis];
        // ln cosh t = |t| + ln((1 + e^{-2|t|})/2), stable for large |t|
        let value = self.amplitude * (t.abs() + (-2.0 * t.abs()).exp().ln_1p() - std::f64::consts::LN_2);
        let mut jet = ScalarJet::constant(self.dim, value);
        jet.grad[self.axis] = self.amplitude * self.rate * t.tanh();
        jet.hess[(self.axis, self.axis)] = self.amplitude * self.rate * self.rate / t.cosh().powi(2);
        jet
    }
}

/// `amplitude · sin(freq · x_axis + phase)`.
#[derive(Debug, Clone, Copy)]
pub struct Sinusoid {
    pub dim: usize,
    pub axis: usize,
    pub amplitude: f64,
    pub freq: f64,
    pub phase: f64,
}

impl Sinusoid {
    /// `cos(x_axis)`, e.g. `u = cos θ` on the sphere.
    pub fn cosine(dim: usize, axis: usize) -> Self {
        Self { dim, axis, amplitude: 1.0, freq: 1.0, phase: std::f64::consts::FRAC_PI_2 }
    }
}

impl ScalarField for Sinusoid {
    fn dim(&self) -> usize {
        self.dim
    }
    fn jet(&self, x: &[f64]) -> ScalarJet {
        let arg = self.freq * x[self.axis] + self.phase;
        let mut jet = ScalarJet::constant(self.dim, self.amplitude * arg.sin());
        jet.grad[self.axis] = self.amplitude * self.freq * arg.cos();
        jet.hess[(self.axis, self.axis)] = -self.amplitude * self.freq * self.freq * arg.sin();
        jet
    }
}

pub struct SumField {
    dim: usize,
    parts: Vec<Box<dyn ScalarField>>,
}

impl SumField {
    pub fn new(dim: usize, parts: Vec<Box<dyn ScalarField>>) -> Self {
        Self { dim, parts }
    }
}

impl ScalarField for SumField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn jet(&self, x: &[f64]) -> ScalarJet {
        self.parts.iter().fold(ScalarJet::zero(self.dim), |mut acc, p| {
            let j = p.jet(x);
            acc.value += j.value;
            acc.grad += j.grad;
            acc.hess += j.hess;
            acc
        })
    }
}

/// `f = Σ_q a_q sin(k_q·x + ψ_q) + ½ xᵀBx`, an analytic potential with
/// nonvanishing derivatives of every order.
#[derive(Debug, Clone)]
pub struct RandomTrigPotential {
    terms: Vec<(f64, DVector<f64>, f64)>,
    quad: Quadratic,
}

impl RandomTrigPotential {
    pub fn generate(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let terms = (0..3)
            .map(|_| {
                let k = DVector::from_fn(dim, |_, _| rng.gen_range(-3.0..3.0));
                (rng.gen_range(-0.5..0.5), k, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let mut quad = Quadratic::random(dim, seed.wrapping_add(17));
        quad.a *= 0.3;
        quad.b *= 0.3;
        Self { terms, quad }
    }
}

impl ScalarField for RandomTrigPotential {
    fn dim(&self) -> usize {
        self.quad.dim()
    }
    fn jet(&self, x: &[f64]) -> ScalarJet {
        let mut jet = self.quad.jet(x);
        for (a, k, psi) in &self.terms {
            let arg = k.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() + psi;
            let (sn, cs) = arg.sin_cos();
            jet.value += a * sn;
            jet.grad += k * (a * cs);
            jet.hess -= (k * k.transpose()) * (a * sn);
        }
        jet
    }
}

// ---------------------------------------------------------------------------
// Rotationally symmetric charts

/// Generic polar angles, away from the coordinate poles.
pub const GENERIC_ANGLE: f64 = 1.1;

/// Chart sample of `dr² + w(r)² g_{S^{n-1}}` with radial potential, at radius
/// `r` and polar angles all equal to [`GENERIC_ANGLE`]. `w` and `f` are
/// `(value, first, second)` radial derivatives. For `n = 1` the chart is the
/// line `dt²` and `w` is ignored.
pub fn rotational_sample(n: usize, r: f64, w: [f64; 3], f: [f64; 3]) -> ChartSample {
    let angles = vec![GENERIC_ANGLE; n.saturating_sub(1)];
    let sf = sphere_factors(&angles);
    let [w0, w1, w2] = w;
    let mut g = DMatrix::zeros(n, n);
    let mut d1 = Tensor3::zeros(n);
    let mut d2 = Tensor4::zeros(n);
    g[(0, 0)] = 1.0;
    for a in 1..n {
        let s = sf.s[a - 1];
        g[(a, a)] = w0 * w0 * s;
        d1[(a, a, 0)] = 2.0 * w0 * w1 * s;
        d2[(a, a, 0, 0)] = 2.0 * (w1 * w1 + w0 * w2) * s;
        for b in 1..n {
            let ds = sf.d1[a - 1][b - 1];
            d1[(a, a, b)] = w0 * w0 * ds;
            d2[(a, a, 0, b)] = 2.0 * w0 * w1 * ds;
            d2[(a, a, b, 0)] = 2.0 * w0 * w1 * ds;
            for c in 1..n {
                d2[(a, a, b, c)] = w0 * w0 * sf.d2[a - 1][b - 1][c - 1];
            }
        }
    }
    let mut point = DVector::from_element(n, GENERIC_ANGLE);
    point[0] = r;
    let mut jet = ScalarJet::constant(n, f[0]);
    jet.grad[0] = f[1];
    jet.hess[(0, 0)] = f[2];
    ChartSample::from_metric(point, g, d1, d2).with_potential(jet)
}
