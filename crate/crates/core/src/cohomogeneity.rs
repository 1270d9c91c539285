//! Rotationally symmetric quasi-Einstein metrics `g = dr² + w(r)² g_S` with a
//! radial potential `f(r)`, reduced to a pair of ODEs and solved by shooting
//! from a regular centre (or, for `n = 1`, from `t = 0` in both directions).

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrator::{integrate, Outcome, State, Tolerances};
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiEinsteinSpec {
    pub n: usize,
    pub m: Weight,
    pub lambda: f64,
}

impl QuasiEinsteinSpec {
    pub fn new(n: usize, m: Weight, lambda: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("dimension must be at least 1"));
        }
        if !lambda.is_finite() {
            return Err(Error::domain(format!("lambda must be finite, got {lambda}")));
        }
        Ok(Self { n, m, lambda })
    }

    fn eps(&self) -> f64 {
        self.m.reciprocal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileState {
    pub r: f64,
    pub w: f64,
    pub wp: f64,
    pub f: f64,
    pub fp: f64,
}

impl ProfileState {
    fn to_array(self) -> State<4> {
        [self.w, self.wp, self.f, self.fp]
    }

    fn from_array(r: f64, y: &State<4>) -> Self {
        Self { r, w: y[0], wp: y[1], f: y[2], fp: y[3] }
    }
}

/// Second derivatives `(w'', f'')` from the reduced equations. For `n = 1`
/// the warping function plays no role and `w'' = 0`.
pub fn ode_rhs(state: &ProfileState, spec: &QuasiEinsteinSpec) -> Result<(f64, f64)> {
    let QuasiEinsteinSpec { n, lambda, .. } = *spec;
    let eps = spec.eps();
    let ProfileState { w, wp, fp, .. } = *state;
    if n == 1 {
        return Ok((0.0, lambda + eps * fp * fp));
    }
    if !(w > 0.0) {
        return Err(Error::domain(format!("warping function must be positive, got w = {w}")));
    }
    let nn = n as f64;
    let wpp = -lambda * w + wp * fp - (nn - 2.0) * (wp * wp - 1.0) / w;
    let fpp = lambda + eps * fp * fp + (nn - 1.0) * wpp / w;
    Ok((wpp, fpp))
}

/// Truncated power series `w = r + w3 r³`, `f = f0 + s r²` evaluated at the
/// starting radius, with the residual of the ODE there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSeed {
    pub state: ProfileState,
    pub w3: f64,
    /// Coefficient `s` of `r²` in `f`.
    pub f2: f64,
    pub residual: f64,
}

pub const DEFAULT_SEED_RADIUS: f64 = 1e-4;

/// Cubic coefficient of `w` forced by smoothness at the centre.
pub fn compatible_w3(spec: &QuasiEinsteinSpec, s: f64) -> Result<f64> {
    if spec.n < 2 {
        return Err(Error::domain("a regular centre needs n >= 2"));
    }
    Ok((2.0 * s - spec.lambda) / (6.0 * (spec.n as f64 - 1.0)))
}

pub fn series_seed(spec: &QuasiEinsteinSpec, s: f64, eps0: f64) -> Result<SeriesSeed> {
    let w3 = compatible_w3(spec, s)?;
    seed_with_coefficients(spec, s, w3, eps0)
}

/// A seed with arbitrary coefficients; incompatible choices show up as an
/// O(1) residual.
pub fn seed_with_coefficients(spec: &QuasiEinsteinSpec, s: f64, w3: f64, eps0: f64) -> Result<SeriesSeed> {
    if spec.n < 2 {
        return Err(Error::domain("a regular centre needs n >= 2"));
    }
    if !(eps0 > 0.0 && eps0 < 0.1) {
        return Err(Error::domain(format!("seed radius must lie in (0, 0.1), got {eps0}")));
    }
    let r = eps0;
    let state =
        ProfileState { r, w: r + w3 * r.powi(3), wp: 1.0 + 3.0 * w3 * r * r, f: s * r * r, fp: 2.0 * s * r };
    let (wpp, fpp) = ode_rhs(&state, spec)?;
    let residual = (wpp - 6.0 * w3 * r).abs().max((fpp - 2.0 * s).abs());
    Ok(SeriesSeed { state, w3, f2: s, residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    pub seed_radius: f64,
    pub seed_tolerance: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// `|f'|` beyond which the potential is declared to blow up.
    pub blowup_threshold: f64,
    /// `w` below this fraction of its running maximum (while decreasing)
    /// counts as the warping function closing up.
    pub degenerate_fraction: f64,
    /// Bound on `|f'|` and `|f''|` below which a run counts as `f ≡ 0`. The
    /// integrator tolerance, amplified along the run, sets how small it can be.
    pub trivial_tolerance: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            seed_radius: DEFAULT_SEED_RADIUS,
            seed_tolerance: 1e-6,
            rtol: 1e-10,
            atol: 1e-12,
            max_step: 0.05,
            blowup_threshold: 1e8,
            degenerate_fraction: 1e-6,
            trivial_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Reached,
    BlowUp { r_star: f64 },
    Degenerate { r_star: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    CompleteToHorizon,
    PotentialBlowUp { r_star: f64 },
    WarpingDegenerate { r_star: f64 },
    Trivial,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Self::CompleteToHorizon => "complete_to_horizon",
            Self::PotentialBlowUp { .. } => "potential_blow_up",
            Self::WarpingDegenerate { .. } => "warping_degenerate",
            Self::Trivial => "trivial",
        }
    }

    pub fn r_star(&self) -> Option<f64> {
        match *self {
            Self::PotentialBlowUp { r_star } | Self::WarpingDegenerate { r_star } => Some(r_star),
            _ => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.r_star() {
            Some(r) => write!(f, "{}(r*={r:.10e})", self.label()),
            None => f.write_str(self.label()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuSource {
    /// `−(Δ_f f − mλ) e^{−2f/m} / m`, the trace of the warped-product fibre equation.
    WarpedTrace,
    /// `−(Δ_f f + 2λf)` for gradient solitons.
    SolitonTrace,
    /// `R + |∇f|²` for steady solitons.
    ScalarPlusGradient,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuEstimate {
    pub value: f64,
    /// Largest pointwise deviation from `value` over the grid.
    pub max_deviation: f64,
    pub source: MuSource,
}

impl MuEstimate {
    fn from_samples(samples: impl Iterator<Item = f64>, source: MuSource) -> Self {
        let v: Vec<f64> = samples.collect();
        let value = v.iter().sum::<f64>() / v.len().max(1) as f64;
        let max_deviation = v.iter().map(|x| (x - value).abs()).fold(0.0, f64::max);
        Self { value, max_deviation, source }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub spec: QuasiEinsteinSpec,
    /// `s = f''(0)/2` for a regular centre, `f'(0)` for `n = 1`.
    pub shoot_param: f64,
    pub seed: Option<SeriesSeed>,
    /// Increasing in `r`.
    pub states: Vec<ProfileState>,
    /// `(w'', f'')` at each state.
    pub accelerations: Vec<(f64, f64)>,
    pub forward: Termination,
    /// Only for `n = 1`, which is integrated towards `−r_max` as well.
    pub backward: Option<Termination>,
    pub classification: Classification,
    pub mu: MuEstimate,
    trivial_tolerance: f64,
}

/// Pointwise ratios that are singular at the centre, with their limits there.
struct Ratios {
    wpp_over_w: f64,
    wp_fp_over_w: f64,
    one_minus_wp2_over_w2: f64,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    fn ratios(&self, i: usize) -> Ratios {
        if self.spec.n == 1 {
            return Ratios { wpp_over_w: 0.0, wp_fp_over_w: 0.0, one_minus_wp2_over_w2: 0.0 };
        }
        let st = &self.states[i];
        if st.r == 0.0 {
            let seed = self.seed.expect("a regular centre always carries its seed");
            return Ratios {
                wpp_over_w: 6.0 * seed.w3,
                wp_fp_over_w: 2.0 * seed.f2,
                one_minus_wp2_over_w2: -6.0 * seed.w3,
            };
        }
        Ratios {
            wpp_over_w: self.accelerations[i].0 / st.w,
            wp_fp_over_w: st.wp * st.fp / st.w,
            one_minus_wp2_over_w2: (1.0 - st.wp * st.wp) / (st.w * st.w),
        }
    }

    /// `Δ_f f = f'' + (n−1)(w'/w) f' − f'²`.
    pub fn drift_laplacian_f(&self, i: usize) -> f64 {
        let st = &self.states[i];
        let n1 = self.spec.n as f64 - 1.0;
        self.accelerations[i].1 + n1 * self.ratios(i).wp_fp_over_w - st.fp * st.fp
    }

    /// Scalar curvature of `dr² + w² g_S`.
    pub fn scalar_curvature(&self, i: usize) -> f64 {
        let n = self.spec.n as f64;
        let q = self.ratios(i);
        -2.0 * (n - 1.0) * q.wpp_over_w + (n - 1.0) * (n - 2.0) * q.one_minus_wp2_over_w2
    }

    /// Pointwise value of the quantity that is constant on solutions.
    pub fn mu_pointwise(&self, i: usize) -> f64 {
        let st = &self.states[i];
        let lap = self.drift_laplacian_f(i);
        let lambda = self.spec.lambda;
        match self.spec.m {
            Weight::Finite(m) => -(lap - m * lambda) * (-2.0 * st.f / m).exp() / m,
            Weight::Infinite => -(lap + 2.0 * lambda * st.f),
        }
    }

    /// `R + f'²`.
    pub fn steady_pointwise(&self, i: usize) -> f64 {
        let fp = self.states[i].fp;
        self.scalar_curvature(i) + fp * fp
    }

    /// Cubic Hermite interpolation of the state; `r` is clamped to the grid.
    pub fn interpolate(&self, r: f64) -> ProfileState {
        let s = &self.states;
        let r = r.clamp(s[0].r, s[s.len() - 1].r);
        let k = s.partition_point(|st| st.r <= r).clamp(1, s.len() - 1);
        let (a, b) = (&s[k - 1], &s[k]);
        let (aa, ba) = (self.accelerations[k - 1], self.accelerations[k]);
        let h = b.r - a.r;
        if h == 0.0 {
            return *a;
        }
        let t = (r - a.r) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let herm = |y0: f64, d0: f64, y1: f64, d1: f64| h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        ProfileState {
            r,
            w: herm(a.w, a.wp, b.w, b.wp),
            wp: herm(a.wp, aa.0, b.wp, ba.0),
            f: herm(a.f, a.fp, b.f, b.fp),
            fp: herm(a.fp, aa.1, b.fp, ba.1),
        }
    }

    pub fn sup_abs_fp(&self) -> f64 {
        self.states.iter().map(|s| s.fp.abs()).fold(0.0, f64::max)
    }
}

/// Integrates the reduced system out to `r_max` (and to `−r_max` when `n = 1`).
pub fn shoot(spec: &QuasiEinsteinSpec, shoot_param: f64, r_max: f64, opts: &ShootOptions) -> Result<Profile> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::domain(format!("r_max must be positive and finite, got {r_max}")));
    }
    if !shoot_param.is_finite() {
        return Err(Error::domain("shooting parameter must be finite"));
    }
    if spec.n == 1 {
        return shoot_line(spec, shoot_param, r_max, opts);
    }
    let seed = series_seed(spec, shoot_param, opts.seed_radius)?;
    if seed.residual > opts.seed_tolerance {
        return Err(Error::domain(format!(
            "series seed residual {:.3e} exceeds {:.1e}",
            seed.residual, opts.seed_tolerance
        )));
    }
    if r_max <= seed.state.r {
        return Err(Error::domain("r_max must exceed the seed radius"));
    }
    let (pts, forward) = run_direction(spec, seed.state, r_max, opts, shoot_param)?;
    let origin = ProfileState { r: 0.0, w: 0.0, wp: 1.0, f: 0.0, fp: 0.0 };
    let mut states = vec![origin];
    let mut accelerations = vec![(0.0, 2.0 * shoot_param)];
    for st in pts {
        accelerations.push(ode_rhs(&st, spec)?);
        states.push(st);
    }
    Ok(finish(*spec, shoot_param, Some(seed), states, accelerations, forward, None, opts))
}

fn shoot_line(spec: &QuasiEinsteinSpec, v0: f64, r_max: f64, opts: &ShootOptions) -> Result<Profile> {
    let start = ProfileState { r: 0.0, w: 1.0, wp: 0.0, f: 0.0, fp: v0 };
    let (fwd, forward) = run_direction(spec, start, r_max, opts, v0)?;
    let (bwd, backward) = run_direction(spec, start, -r_max, opts, v0)?;
    let states: Vec<ProfileState> = bwd.into_iter().skip(1).rev().chain(fwd).collect();
    let accelerations = states.iter().map(|s| ode_rhs(s, spec)).collect::<Result<Vec<_>>>()?;
    Ok(finish(*spec, v0, None, states, accelerations, forward, Some(backward), opts))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    spec: QuasiEinsteinSpec,
    shoot_param: f64,
    seed: Option<SeriesSeed>,
    states: Vec<ProfileState>,
    accelerations: Vec<(f64, f64)>,
    forward: Termination,
    backward: Option<Termination>,
    opts: &ShootOptions,
) -> Profile {
    let mut p = Profile {
        spec,
        shoot_param,
        seed,
        states,
        accelerations,
        forward,
        backward,
        classification: Classification::CompleteToHorizon,
        mu: MuEstimate { value: 0.0, max_deviation: 0.0, source: MuSource::WarpedTrace },
        trivial_tolerance: opts.trivial_tolerance,
    };
    p.mu = profile_mu(&p);
    p.classification = classify_solution(&p);
    p
}

/// Least-squares zero of `1/f'` over the last three points.
fn blowup_radius(pts: &[(f64, State<4>)]) -> f64 {
    let tail = &pts[pts.len().saturating_sub(3)..];
    let k = tail.len() as f64;
    let (mut sr, mut sy, mut srr, mut sry) = (0.0, 0.0, 0.0, 0.0);
    for (r, y) in tail {
        let inv = 1.0 / y[3];
        sr += r;
        sy += inv;
        srr += r * r;
        sry += r * inv;
    }
    let det = k * srr - sr * sr;
    if det.abs() < f64::MIN_POSITIVE || tail.len() < 2 {
        return tail[tail.len() - 1].0;
    }
    let slope = (k * sry - sr * sy) / det;
    let icpt = (sy - slope * sr) / k;
    -icpt / slope
}

fn run_direction(
    spec: &QuasiEinsteinSpec,
    start: ProfileState,
    r_end: f64,
    opts: &ShootOptions,
    shoot_param: f64,
) -> Result<(Vec<ProfileState>, Termination)> {
    let tol = Tolerances {
        rtol: opts.rtol,
        atol: opts.atol,
        max_step: opts.max_step,
        first_step: (start.r.abs() * 0.1).clamp(1e-7, 1e-4),
        ..Tolerances::default()
    };
    let rhs = |r: f64, y: &State<4>| {
        let st = ProfileState::from_array(r, y);
        let (wpp, fpp) = ode_rhs(&st, spec)?;
        Ok([y[1], wpp, y[3], fpp])
    };
    let regular_centre = spec.n >= 2;
    let mut w_max = start.w;
    let traj = integrate(rhs, start.r, start.to_array(), r_end, &tol, |pts| {
        let (r, y) = pts[pts.len() - 1];
        if y[3].abs() > opts.blowup_threshold {
            return Some(Termination::BlowUp { r_star: blowup_radius(pts) });
        }
        if regular_centre {
            w_max = w_max.max(y[0]);
            if y[0] < opts.degenerate_fraction * w_max.max(1.0) && y[1] < 0.0 {
                return Some(Termination::Degenerate { r_star: r - y[0] / y[1] });
            }
        }
        None
    })?;
    let termination = match traj.outcome {
        Outcome::Reached => Termination::Reached,
        Outcome::Stopped(t) => t,
        Outcome::StepCollapse { r } => {
            let pts = &traj.points;
            let last = pts[pts.len() - 1].1;
            let prev = pts[pts.len().saturating_sub(2)].1;
            if last[3].abs() > 1e3 * (1.0 + shoot_param.abs()) && last[3].abs() > prev[3].abs() {
                Termination::BlowUp { r_star: blowup_radius(pts) }
            } else if regular_centre && last[0] < 1e-3 * w_max && last[1] < 0.0 {
                Termination::Degenerate { r_star: r - last[0] / last[1] }
            } else {
                return Err(Error::Integrator { r, reason: "step size collapsed".into() });
            }
        }
    };
    let states = traj.points.iter().map(|(r, y)| ProfileState::from_array(*r, y)).collect();
    Ok((states, termination))
}

/// Averages the pointwise constant over the grid.
pub fn profile_mu(profile: &Profile) -> MuEstimate {
    let source = if profile.spec.m.is_infinite() { MuSource::SolitonTrace } else { MuSource::WarpedTrace };
    MuEstimate::from_samples((0..profile.len()).map(|i| profile.mu_pointwise(i)), source)
}

/// `R + f'²` over the grid; defined for steady gradient solitons only.
pub fn steady_invariant(profile: &Profile) -> Result<MuEstimate> {
    if !profile.spec.m.is_infinite() || profile.spec.lambda != 0.0 {
        return Err(Error::contract("R + |∇f|² is conserved only for steady solitons (m = ∞, λ = 0)"));
    }
    Ok(MuEstimate::from_samples(
        (0..profile.len()).map(|i| profile.steady_pointwise(i)),
        MuSource::ScalarPlusGradient,
    ))
}

pub fn classify_solution(profile: &Profile) -> Classification {
    let terms = [Some(profile.forward), profile.backward];
    for t in terms.iter().flatten() {
        if let Termination::BlowUp { r_star } = *t {
            return Classification::PotentialBlowUp { r_star };
        }
    }
    for t in terms.iter().flatten() {
        if let Termination::Degenerate { r_star } = *t {
            return Classification::WarpingDegenerate { r_star };
        }
    }
    // f' ≡ 0 forces f'' = 0, i.e. the metric is Einstein with constant λ
    let tol = profile.trivial_tolerance;
    let flat_potential = profile.sup_abs_fp() < tol
        && profile.accelerations.iter().all(|a| a.1.abs() < tol * (1.0 + profile.spec.lambda.abs()));
    if flat_potential {
        Classification::Trivial
    } else {
        Classification::CompleteToHorizon
    }
}

/// True when the run is a steady, complete, nontrivial solution with `μ ≤ 0`
/// — a configuration that must not occur.
pub fn contradicts_nonexistence(profile: &Profile) -> bool {
    profile.spec.lambda == 0.0
        && profile.classification == Classification::CompleteToHorizon
        && profile.mu.value <= 0.0
}

/// Shoots once per parameter, in parallel; results keep the input order.
pub fn sweep(spec: &QuasiEinsteinSpec, params: &[f64], r_max: f64, opts: &ShootOptions) -> Vec<Result<Profile>> {
    params.par_iter().map(|&s| shoot(spec, s, r_max, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, m: Weight, lambda: f64) -> QuasiEinsteinSpec {
        QuasiEinsteinSpec::new(n, m, lambda).unwrap()
    }

    #[test]
    fn line_blow_up_location() {
        // f'' = f'²/2 with f'(0) = 1 gives f' = 1/(1 − t/2)
        let sp = spec(1, Weight::Finite(2.0), 0.0);
        let p = shoot(&sp, 1.0, 5.0, &ShootOptions::default()).unwrap();
        match p.classification {
            Classification::PotentialBlowUp { r_star } => assert!((r_star - 2.0).abs() < 1e-6, "{r_star}"),
            c => panic!("unexpected {c}"),
        }
        let mid = p.interpolate(1.0);
        assert!((mid.fp - 2.0).abs() < 1e-8);
        assert!((mid.f + 2.0 * (0.5f64).ln()).abs() < 1e-8);
    }

    #[test]
    fn cosh_line_constant() {
        // f = −2 log cosh t solves the m = 2, λ = −2 line equation with μ = −1
        let sp = spec(1, Weight::Finite(2.0), -2.0);
        let p = shoot(&sp, 0.0, 3.0, &ShootOptions::default()).unwrap();
        assert_eq!(p.classification, Classification::CompleteToHorizon);
        assert!((p.mu.value + 1.0).abs() < 1e-8, "{:?}", p.mu);
        assert!(p.mu.max_deviation < 1e-8, "{:?}", p.mu);
        let st = p.interpolate(-1.3);
        assert!((st.f + 2.0 * 1.3f64.cosh().ln()).abs() < 1e-8);
    }

    #[test]
    fn bryant_soliton_constant() {
        let sp = spec(3, Weight::Infinite, 0.0);
        let p = shoot(&sp, -0.5, 30.0, &ShootOptions::default()).unwrap();
        assert_eq!(p.classification, Classification::CompleteToHorizon);
        assert!((p.mu.value - 3.0).abs() < 1e-6 * 3.0, "{:?}", p.mu);
        assert!(p.mu.max_deviation < 1e-6 * 3.0);
        let steady = steady_invariant(&p).unwrap();
        assert!((steady.value - p.mu.value).abs() < 1e-6 * 3.0);
        assert!(steady.max_deviation < 1e-6 * 3.0);
        assert!(!contradicts_nonexistence(&p));
    }

    #[test]
    fn round_sphere_closes_at_pi() {
        let sp = spec(3, Weight::Finite(2.0), 2.0);
        let p = shoot(&sp, 0.0, 5.0, &ShootOptions::default()).unwrap();
        match p.classification {
            Classification::WarpingDegenerate { r_star } => {
                assert!((r_star - std::f64::consts::PI).abs() < 1e-5, "{r_star}")
            }
            c => panic!("unexpected {c}"),
        }
    }

    #[test]
    fn flat_space_is_trivial() {
        let sp = spec(4, Weight::Finite(3.0), 0.0);
        let p = shoot(&sp, 0.0, 10.0, &ShootOptions::default()).unwrap();
        assert_eq!(p.classification, Classification::Trivial, "{} {:?}", p.sup_abs_fp(), p.accelerations.iter().map(|a| a.1.abs()).fold(0.0, f64::max));
        assert!(p.mu.value.abs() < 1e-12);
        let hyp = shoot(&spec(3, Weight::Finite(2.0), -2.0), 0.0, 4.0, &ShootOptions::default()).unwrap();
        assert_eq!(hyp.classification, Classification::Trivial, "{} {:?}", hyp.sup_abs_fp(), hyp.accelerations.iter().map(|a| a.1.abs()).fold(0.0, f64::max));
        let st = hyp.interpolate(2.0);
        assert!((st.w - 2f64.sinh()).abs() < 1e-8 * 2f64.sinh());
    }

    #[test]
    fn seed_residual_is_small_only_when_compatible() {
        let sp = spec(3, Weight::Finite(2.0), 1.0);
        let good = series_seed(&sp, 0.3, 1e-4).unwrap();
        assert!(good.residual < 1e-6);
        let bad = seed_with_coefficients(&sp, 0.3, good.w3 + 0.5, 1e-4).unwrap();
        assert!(bad.residual > 1e-2);
        assert!(series_seed(&spec(1, Weight::Infinite, 0.0), 0.1, 1e-4).is_err());
    }

    #[test]
    fn steady_invariant_needs_infinite_weight() {
        let p = shoot(&spec(3, Weight::Finite(2.0), 0.0), -0.2, 3.0, &ShootOptions::default()).unwrap();
        assert!(matches!(steady_invariant(&p), Err(Error::Contract(_))));
    }

    #[test]
    fn sweep_preserves_order() {
        let sp = spec(3, Weight::Infinite, 0.0);
        let params = [-0.1, -0.5, -1.0];
        let out = sweep(&sp, &params, 5.0, &ShootOptions::default());
        for (p, s) in out.iter().zip(params) {
            assert_eq!(p.as_ref().unwrap().shoot_param, s);
        }
    }

    #[test]
    fn rejects_bad_domain() {
        let sp = spec(2, Weight::Infinite, 0.0);
        assert!(shoot(&sp, 0.1, -1.0, &ShootOptions::default()).is_err());
        let st = ProfileState { r: 1.0, w: 0.0, wp: 1.0, f: 0.0, fp: 0.0 };
        assert!(ode_rhs(&st, &sp).is_err());
    }
}
