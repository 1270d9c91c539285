//! Gradient and Laplacian-comparison estimates on radial data, and the
//! conformal rescaling workflow for steady solitons.
//!
//! Radial data are a profile `dr² + w² g_S` with potential `f`, sampled on an
//! increasing grid together with first and second derivatives. Distances on
//! such data are radial coordinate differences.

use crate::chart::ChartSample;
use crate::cohomogeneity::Profile;
use crate::conformal::{corollary_lower_bound, RescaleSpec, SourceTerm};
use crate::curvature::{min_eigenvalue_relative, weighted_tensors};
use crate::error::{Error, Result};
use crate::models::rotational_sample;
use crate::weight::Weight;

/// Verdict tolerance, relative to the bound.
pub const VERDICT_TOL: f64 = 1e-9;
/// Slack allowed in the curvature and source hypotheses.
pub const HYPOTHESIS_TOL: f64 = 1e-7;
/// Relative accuracy of length integrals.
pub const LENGTH_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallSpec {
    pub center: f64,
    pub a: f64,
}

impl BallSpec {
    pub fn new(center: f64, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !center.is_finite() {
            return Err(Error::domain(format!("ball needs finite centre and radius > 0, got ({center}, {a})")));
        }
        Ok(Self { center, a })
    }
}

/// The function `φ` in `Δ_f f = φ(f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceModel {
    /// `φ(t) = mλ − mμ e^{2t/m}`.
    QuasiEinstein { m: f64, lambda: f64, mu: f64 },
    /// `φ(t) = c₁ e^{c₂ t}`.
    Exponential(SourceTerm),
}

impl SourceModel {
    pub fn phi(&self, t: f64) -> f64 {
        match *self {
            Self::QuasiEinstein { m, lambda, mu } => m * lambda - m * mu * (2.0 * t / m).exp(),
            Self::Exponential(src) => src.eval(t),
        }
    }

    pub fn phi_prime(&self, t: f64) -> f64 {
        match *self {
            Self::QuasiEinstein { m, mu, .. } => -2.0 * mu * (2.0 * t / m).exp(),
            Self::Exponential(src) => src.c2 * src.eval(t),
        }
    }

    /// `φ′ + (2/n)φ`, required to be non-negative by the gradient estimate.
    pub fn hypothesis_value(&self, t: f64, n: usize) -> f64 {
        self.phi_prime(t) + 2.0 / n as f64 * self.phi(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub rho: f64,
    pub w: f64,
    pub w1: f64,
    pub w2: f64,
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialData {
    pub n: usize,
    pub m: Weight,
    /// Increasing in `rho`.
    pub points: Vec<RadialPoint>,
    pub source: Option<SourceModel>,
}

fn hermite(t: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    let h10 = t * (1.0 - t) * (1.0 - t);
    let h01 = t * t * (3.0 - 2.0 * t);
    let h11 = t * t * (t - 1.0);
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Integral over `[a, b]` of a function that is smooth there, to relative
/// accuracy `rtol` (absolute `rtol` for tiny integrals).
fn integrate_smooth(f: impl Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let scale = f(a).abs().max(f(0.5 * (a + b)).abs()).max(f(b).abs()).max(1e-300);
    let out = quadrature::clenshaw_curtis::integrate(&f, a, b, 0.1 * rtol * scale * (b - a).abs());
    if !out.integral.is_finite() {
        return Err(Error::Integrator { r: a, reason: "non-finite quadrature".into() });
    }
    if out.error_estimate > rtol * out.integral.abs().max(scale * (b - a).abs() * 1e-3) {
        return Err(Error::Integrator {
            r: a,
            reason: format!("quadrature error {:.2e} above tolerance", out.error_estimate),
        });
    }
    Ok(out.integral)
}

impl RadialData {
    /// The profile's own data; quasi-Einstein profiles with finite `m` carry
    /// the source `mλ − mμe^{2t/m}` with their measured `μ`.
    pub fn from_profile(profile: &Profile) -> Self {
        let spec = profile.spec;
        let points = profile
            .states
            .iter()
            .zip(&profile.accelerations)
            .map(|(s, a)| RadialPoint { rho: s.r, w: s.w, w1: s.wp, w2: a.0, f: s.f, f1: s.fp, f2: a.1 })
            .collect();
        let source = match spec.m {
            Weight::Finite(m) => Some(SourceModel::QuasiEinstein { m, lambda: spec.lambda, mu: profile.mu.value }),
            Weight::Infinite if spec.lambda == 0.0 => {
                Some(SourceModel::Exponential(SourceTerm { c1: -profile.mu.value, c2: 0.0 }))
            }
            Weight::Infinite => None,
        };
        Self { n: spec.n, m: spec.m, points, source }
    }

    /// The conformally rescaled data `(g̃, f̃)` in the `g̃`-arclength `ρ`.
    /// A source `Δ_f f = c₁e^{c₂f}` of the original maps to
    /// `Δ̃ f̃ = (m̃c₁/D) e^{(c₂+2/D) f̃/b}`.
    pub fn rescaled(profile: &Profile, spec: &RescaleSpec, src: Option<SourceTerm>) -> Result<Self> {
        let n = profile.spec.n;
        if spec.dim() != n {
            return Err(Error::domain(format!("rescale spec is for dimension {}, profile has {n}", spec.dim())));
        }
        let inv_d = 1.0 / spec.denominator();
        let b = spec.potential_factor();
        // ρ(r) = ∫₀^r e^{−f/D}, accumulated outward from r = 0 in both directions
        let states = &profile.states;
        let zero = states.iter().position(|s| s.r == 0.0).ok_or_else(|| Error::domain("profile grid lacks r = 0"))?;
        let mut rho = vec![0.0; states.len()];
        let density = |r: f64| (-profile.interpolate(r).f * inv_d).exp();
        for i in zero + 1..states.len() {
            rho[i] = rho[i - 1] + integrate_smooth(density, states[i - 1].r, states[i].r, 1e-12)?;
        }
        for i in (0..zero).rev() {
            rho[i] = rho[i + 1] - integrate_smooth(density, states[i].r, states[i + 1].r, 1e-12)?;
        }
        let points = states
            .iter()
            .zip(&profile.accelerations)
            .zip(rho)
            .map(|((s, &(wpp, fpp)), rho)| {
                let e = (s.f * inv_d).exp();
                RadialPoint {
                    rho,
                    w: s.w / e,
                    w1: s.wp - s.fp * s.w * inv_d,
                    w2: e * (wpp - fpp * s.w * inv_d - s.fp * s.wp * inv_d),
                    f: b * s.f,
                    f1: b * s.fp * e,
                    f2: b * e * e * (fpp + s.fp * s.fp * inv_d),
                }
            })
            .collect();
        let source = src.map(|s| {
            SourceModel::Exponential(SourceTerm {
                c1: spec.m_tilde() * s.c1 * inv_d,
                c2: (s.c2 + 2.0 * inv_d) / b,
            })
        });
        Ok(Self { n, m: spec.weight(), points, source })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.points[0].rho, self.points[self.points.len() - 1].rho)
    }

    /// A polar-chart sample of the data at grid point `i`; `None` at a
    /// regular centre, where the polar chart is singular.
    pub fn sample(&self, i: usize) -> Option<ChartSample> {
        let p = &self.points[i];
        if self.n >= 2 && p.w <= 0.0 {
            return None;
        }
        Some(rotational_sample(self.n, p.rho, [p.w, p.w1, p.w2], [p.f, p.f1, p.f2]))
    }

    /// Cubic Hermite interpolation; `rho` is clamped to the grid.
    pub fn interpolate(&self, rho: f64) -> RadialPoint {
        let s = &self.points;
        let rho = rho.clamp(s[0].rho, s[s.len() - 1].rho);
        let k = s.partition_point(|p| p.rho <= rho).clamp(1, s.len() - 1);
        let (a, b) = (&s[k - 1], &s[k]);
        let h = b.rho - a.rho;
        if h == 0.0 {
            return *a;
        }
        let t = (rho - a.rho) / h;
        RadialPoint {
            rho,
            w: hermite(t, h, a.w, a.w1, b.w, b.w1),
            w1: hermite(t, h, a.w1, a.w2, b.w1, b.w2),
            w2: a.w2 + t * (b.w2 - a.w2),
            f: hermite(t, h, a.f, a.f1, b.f, b.f1),
            f1: hermite(t, h, a.f1, a.f2, b.f1, b.f2),
            f2: a.f2 + t * (b.f2 - a.f2),
        }
    }

    /// Grid indices with `rho` in `[lo, hi]`.
    fn indices_in(&self, lo: f64, hi: f64) -> impl Iterator<Item = usize> + '_ {
        (0..self.points.len()).filter(move |&i| (lo..=hi).contains(&self.points[i].rho))
    }

    /// Clips a ball to the radial domain, or reports that it leaves the grid.
    fn ball_interval(&self, ball: &BallSpec) -> Result<(f64, f64)> {
        let (g0, g1) = self.range();
        let lo = if self.n >= 2 { (ball.center - ball.a).max(0.0) } else { ball.center - ball.a };
        let hi = ball.center + ball.a;
        if ball.center < g0 || lo < g0 || hi > g1 {
            return Err(Error::domain(format!(
                "ball [{lo}, {hi}] around {} leaves the computed range [{g0}, {g1}]",
                ball.center
            )));
        }
        Ok((lo, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisMode {
    /// A failed hypothesis is an error and no verdict is produced.
    Strict,
    /// Estimates are evaluated regardless; the hypothesis status is recorded.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    pub verdict_tol: f64,
    pub hypothesis_tol: f64,
    pub mode: HypothesisMode,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { verdict_tol: VERDICT_TOL, hypothesis_tol: HYPOTHESIS_TOL, mode: HypothesisMode::Strict }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisStatus {
    /// Smallest eigenvalue of `Ric_f^m` relative to the metric over the domain.
    pub ric_min: f64,
    pub ric_witness: f64,
    /// Smallest value of `φ′ + (2/n)φ` over the potential's range, if checked.
    pub source_min: Option<f64>,
    pub satisfied: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub bound: f64,
    pub observed: f64,
    /// `bound − observed`
    pub margin: f64,
    pub tol: f64,
    pub pass: bool,
    /// Radius where `observed` was attained.
    pub witness: f64,
}

impl EstimateReport {
    fn new(bound: f64, observed: f64, witness: f64, rel_tol: f64) -> Self {
        let margin = bound - observed;
        let tol = rel_tol * bound.abs();
        Self { bound, observed, margin, tol, pass: margin >= -tol, witness }
    }
}

fn ric_status(data: &RadialData, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let mut min = f64::INFINITY;
    let mut witness = f64::NAN;
    for i in data.indices_in(lo, hi) {
        if let Some(sample) = data.sample(i) {
            let wc = weighted_tensors(&sample, data.m)?;
            let e = min_eigenvalue_relative(&wc.bakry_emery, &sample.metric)?;
            if e < min {
                min = e;
                witness = data.points[i].rho;
            }
        }
    }
    Ok((min, witness))
}

fn check_hypotheses(
    data: &RadialData,
    lo: f64,
    hi: f64,
    with_source: bool,
    opts: &EstimateOptions,
) -> Result<HypothesisStatus> {
    let (ric_min, ric_witness) = ric_status(data, lo, hi)?;
    let mut notes = Vec::new();
    let ric_ok = !(ric_min < -opts.hypothesis_tol);
    if !ric_ok {
        notes.push(format!("Ric_f^m >= 0 fails: smallest eigenvalue {ric_min:.6e} at r = {ric_witness:.6e}"));
    }
    let mut source_min = None;
    let mut source_ok = true;
    if with_source {
        match data.source {
            Some(src) => {
                // φ′ + (2/n)φ is monotone in t for both models: check the extremes of f
                let fs = data.indices_in(lo, hi).map(|i| data.points[i].f);
                let (fmin, fmax) = fs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), f| (a.min(f), b.max(f)));
                let v = src.hypothesis_value(fmin, data.n).min(src.hypothesis_value(fmax, data.n));
                let scale = 1.0 + src.phi(fmin).abs().max(src.phi(fmax).abs());
                source_ok = v >= -opts.hypothesis_tol * scale;
                if !source_ok {
                    notes.push(format!("phi' + (2/n) phi >= 0 fails: minimum {v:.6e}"));
                }
                source_min = Some(v);
            }
            None => {
                source_ok = false;
                notes.push("no source relation known for these data".into());
            }
        }
    }
    let satisfied = ric_ok && source_ok;
    if !satisfied && opts.mode == HypothesisMode::Strict {
        return Err(Error::hypothesis(notes.join("; ")));
    }
    Ok(HypothesisStatus { ric_min, ric_witness, source_min, satisfied, notes })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientReport {
    /// `|∇f|²(x) ≤ 2n(m+n+6)/a²`
    pub center: EstimateReport,
    /// `sup_B (a²−d²)²|∇f|² ≤ 2n(m+n+6)a²`
    pub barrier: EstimateReport,
    pub hypotheses: HypothesisStatus,
}

impl GradientReport {
    pub fn pass(&self) -> bool {
        self.center.pass && self.barrier.pass
    }
}

/// `2n(m+n+6)/a²`
pub fn gradient_bound(n: usize, m: f64, a: f64) -> f64 {
    let n = n as f64;
    2.0 * n * (m + n + 6.0) / (a * a)
}

pub fn gradient_estimate_check(data: &RadialData, ball: &BallSpec, opts: &EstimateOptions) -> Result<GradientReport> {
    let Weight::Finite(m) = data.m else {
        return Err(Error::contract("the gradient estimate needs a finite weight"));
    };
    let (lo, hi) = data.ball_interval(ball)?;
    let hypotheses = check_hypotheses(data, lo, hi, true, opts)?;

    let a = ball.a;
    let barrier_at = |rho: f64| {
        let d = rho - ball.center;
        let p = data.interpolate(rho);
        (a * a - d * d).powi(2) * p.f1 * p.f1
    };
    let grad_center = data.interpolate(ball.center).f1.powi(2);
    let center = EstimateReport::new(gradient_bound(data.n, m, a), grad_center, ball.center, opts.verdict_tol);

    let mut best = (barrier_at(ball.center), ball.center);
    let mut best_idx = None;
    for i in data.indices_in(lo, hi) {
        let v = barrier_at(data.points[i].rho);
        if v > best.0 {
            best = (v, data.points[i].rho);
            best_idx = Some(i);
        }
    }
    // refine at the vertex of the parabola through the discrete maximiser
    if let Some(i) = best_idx.filter(|&i| i > 0 && i + 1 < data.points.len()) {
        let (r0, r1, r2) = (data.points[i - 1].rho, data.points[i].rho, data.points[i + 1].rho);
        let (y0, y1, y2) = (barrier_at(r0), best.0, barrier_at(r2));
        let num = (r1 - r0).powi(2) * (y1 - y2) - (r1 - r2).powi(2) * (y1 - y0);
        let den = (r1 - r0) * (y1 - y2) - (r1 - r2) * (y1 - y0);
        if den != 0.0 {
            let rv = r1 - 0.5 * num / den;
            if rv > r0.max(lo) && rv < r2.min(hi) {
                let v = barrier_at(rv);
                if v > best.0 {
                    best = (v, rv);
                }
            }
        }
    }
    let barrier = EstimateReport::new(gradient_bound(data.n, m, a) * a.powi(4), best.0, best.1, opts.verdict_tol);
    Ok(GradientReport { center, barrier, hypotheses })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianReport {
    /// Worst point of `Δ_f d ≤ (m+n−1)/d`.
    pub report: EstimateReport,
    pub hypotheses: HypothesisStatus,
}

/// Checks `Δ_f d ≤ (m+n−1)/d` for the distance `d` from `ball.center` over
/// the grid points with `0 < d ≤ ball.a`. With `n ≥ 2` the centre must be the
/// origin, the only point whose distance function is radial.
pub fn laplacian_comparison_check(
    data: &RadialData,
    ball: &BallSpec,
    opts: &EstimateOptions,
) -> Result<LaplacianReport> {
    let Weight::Finite(m) = data.m else {
        return Err(Error::contract("the Laplacian comparison needs a finite weight"));
    };
    if data.n >= 2 && ball.center != 0.0 {
        return Err(Error::domain("with n >= 2 the comparison is centred at the origin"));
    }
    let (lo, hi) = data.ball_interval(ball)?;
    let hypotheses = check_hypotheses(data, lo, hi, false, opts)?;
    let n1 = data.n as f64 - 1.0;
    let mut worst: Option<EstimateReport> = None;
    for i in data.indices_in(lo, hi) {
        let p = &data.points[i];
        let d = (p.rho - ball.center).abs();
        if d == 0.0 {
            continue;
        }
        let lap = if data.n == 1 { -p.f1 * (p.rho - ball.center).signum() } else { n1 * p.w1 / p.w - p.f1 };
        let rep = EstimateReport::new((m + n1) / d, lap, p.rho, opts.verdict_tol);
        let rel = |r: &EstimateReport| r.margin / r.bound;
        if worst.as_ref().is_none_or(|w| rel(&rep) < rel(w)) {
            worst = Some(rep);
        }
    }
    let report = worst.ok_or_else(|| Error::domain("no grid points inside the comparison domain"))?;
    Ok(LaplacianReport { report, hypotheses })
}

/// `√(8n(m̃+n+6))`
pub fn rescaling_constant(n: usize, m_tilde: f64) -> f64 {
    (8.0 * n as f64 * (m_tilde + n as f64 + 6.0)).sqrt()
}

/// Smallest integer `m̃` with `√(8n(m̃+n+6)) < m̃`, i.e. `m̃² > 8n(m̃+n+6)`.
pub fn minimal_m_tilde(n: usize) -> u64 {
    let n = n as u64;
    (1u64..).find(|&k| k * k > 8 * n * (k + n + 6)).expect("the quadratic eventually dominates")
}

/// `∫_{t0}^{t1} exp(f̃/m̃) dρ` over rescaled data, where `ρ` is the rescaled
/// arclength: the length in the original metric of a unit-speed radial
/// segment of the rescaled one.
pub fn conformal_length(rescaled: &RadialData, t0: f64, t1: f64) -> Result<f64> {
    let Weight::Finite(m_tilde) = rescaled.m else {
        return Err(Error::contract("conformal length needs a finite weight"));
    };
    let (g0, g1) = rescaled.range();
    if !(t0 <= t1 && t0 >= g0 && t1 <= g1) {
        return Err(Error::domain(format!("segment [{t0}, {t1}] outside the computed range [{g0}, {g1}]")));
    }
    let integrand = |rho: f64| (rescaled.interpolate(rho).f / m_tilde).exp();
    // integrate piecewise so that each piece sees one cubic of the interpolant
    let mut knots = vec![t0];
    knots.extend(rescaled.points.iter().map(|p| p.rho).filter(|&r| r > t0 && r < t1));
    knots.push(t1);
    let mut total = 0.0;
    for w in knots.windows(2) {
        total += integrate_smooth(integrand, w[0], w[1], 0.1 * LENGTH_RTOL)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkflowOptions {
    /// Radius (in the rescaled arclength) of the gradient-estimate ball at the origin.
    pub ball_radius: f64,
    /// Radius of the Laplacian-comparison domain; `None` uses the whole grid.
    pub comparison_radius: Option<f64>,
    pub segment: (f64, f64),
    pub estimate: EstimateOptions,
}

impl Default for WorkflowOptions {
    fn default() -> Self {
        Self {
            ball_radius: 1.0,
            comparison_radius: None,
            segment: (0.0, 5.0),
            estimate: EstimateOptions { mode: HypothesisMode::Report, ..EstimateOptions::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkflowReport {
    pub m_tilde: f64,
    pub constant: f64,
    /// `C/m̃ < 1`
    pub threshold_holds: bool,
    pub minimal_m_tilde: u64,
    /// Smallest margin of the rescaled lower bound `Ric̃ ≥ (c₁/D)e^{(c₂+2/D)f}g̃`.
    pub corollary_margin: f64,
    pub corollary_witness: f64,
    pub corollary_pass: bool,
    pub gradient: GradientReport,
    pub laplacian: LaplacianReport,
    pub length: f64,
    pub segment: (f64, f64),
}

impl WorkflowReport {
    pub fn pass(&self) -> bool {
        self.threshold_holds
            && self.corollary_pass
            && self.gradient.pass()
            && self.laplacian.report.pass
            && self.length.is_finite()
    }
}

/// Rescales a steady soliton profile with weight `m̃` and runs the checks
/// of the completeness argument on the result.
pub fn soliton_rescale_workflow(profile: &Profile, m_tilde: Weight, opts: &WorkflowOptions) -> Result<WorkflowReport> {
    if !profile.spec.m.is_infinite() || profile.spec.lambda != 0.0 {
        return Err(Error::contract("the rescaling workflow takes a steady soliton profile (m = ∞, λ = 0)"));
    }
    let n = profile.spec.n;
    let spec = RescaleSpec::new(m_tilde, n)?;
    let mt = spec.m_tilde();
    // steady solitons have Δ_f f = −μ
    let src = SourceTerm { c1: -profile.mu.value, c2: 0.0 };
    let tol = opts.estimate.hypothesis_tol;

    let original = RadialData::from_profile(profile);
    let mut corollary_margin = f64::INFINITY;
    let mut corollary_witness = f64::NAN;
    for i in 0..original.points.len() {
        let Some(sample) = original.sample(i) else { continue };
        let v = corollary_lower_bound(&sample, &spec, &src, tol)?;
        if v.margin < corollary_margin {
            corollary_margin = v.margin;
            corollary_witness = sample.point[0];
        }
    }

    let rescaled = RadialData::rescaled(profile, &spec, Some(src))?;
    let gradient = gradient_estimate_check(&rescaled, &BallSpec::new(0.0, opts.ball_radius)?, &opts.estimate)?;
    let extent = opts.comparison_radius.unwrap_or(rescaled.range().1);
    let laplacian = laplacian_comparison_check(&rescaled, &BallSpec::new(0.0, extent)?, &opts.estimate)?;
    let length = conformal_length(&rescaled, opts.segment.0, opts.segment.1)?;
    let constant = rescaling_constant(n, mt);
    Ok(WorkflowReport {
        m_tilde: mt,
        constant,
        threshold_holds: constant / mt < 1.0,
        minimal_m_tilde: minimal_m_tilde(n),
        corollary_margin,
        corollary_witness,
        corollary_pass: corollary_margin >= -tol,
        gradient,
        laplacian,
        length,
        segment: opts.segment,
    })
}
