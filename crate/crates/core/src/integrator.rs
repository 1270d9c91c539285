//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.
//!
//! The driver reports every accepted step to an observer, which may stop the
//! run; a collapse of the step size is returned as an outcome rather than an
//! error so callers can classify it.

use crate::error::{Error, Result};

pub type State<const N: usize> = [f64; N];

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Largest admissible |step|.
    pub max_step: f64,
    /// Initial |step|.
    pub first_step: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_step: 0.05, first_step: 1e-6, max_steps: 2_000_000 }
    }
}

/// One trial step; `None` when a stage leaves the domain or is non-finite.
fn trial_step<const N: usize>(
    rhs: &impl Fn(f64, &State<N>) -> Result<State<N>>,
    r: f64,
    y: &State<N>,
    h: f64,
    tol: &Tolerances,
) -> Option<(State<N>, f64)> {
    let mut k = [[0.0; N]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..N {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        k[s] = rhs(r + C[s] * h, &ys).ok()?;
        if k[s].iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    let mut y_new = *y;
    let mut err = 0.0f64;
    for i in 0..N {
        let mut inc = 0.0;
        let mut e = 0.0;
        for s in 0..7 {
            inc += B5[s] * k[s][i];
            e += E[s] * k[s][i];
        }
        y_new[i] += h * inc;
        let scale = tol.atol + tol.rtol * y[i].abs().max(y_new[i].abs());
        err = err.max((h * e).abs() / scale);
    }
    if y_new.iter().any(|v| !v.is_finite()) || !err.is_finite() {
        return None;
    }
    Some((y_new, err))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<T> {
    /// The end point was reached.
    Reached,
    /// The observer stopped the run.
    Stopped(T),
    /// The step size fell below the representable resolution at `r`.
    StepCollapse { r: f64 },
}

#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize, T> {
    /// Accepted points, starting with the initial one.
    pub points: Vec<(f64, State<N>)>,
    pub outcome: Outcome<T>,
}

/// Integrates from `r0` towards `r_end` (either direction). The observer sees
/// each accepted point, including the initial one, together with all
/// previously accepted points.
pub fn integrate<const N: usize, T>(
    rhs: impl Fn(f64, &State<N>) -> Result<State<N>>,
    r0: f64,
    y0: State<N>,
    r_end: f64,
    tol: &Tolerances,
    mut observe: impl FnMut(&[(f64, State<N>)]) -> Option<T>,
) -> Result<Trajectory<N, T>> {
    let dir = if r_end >= r0 { 1.0 } else { -1.0 };
    let mut points = vec![(r0, y0)];
    if let Some(stop) = observe(&points) {
        return Ok(Trajectory { points, outcome: Outcome::Stopped(stop) });
    }
    let mut r = r0;
    let mut y = y0;
    let mut h = tol.first_step.min(tol.max_step) * dir;
    let mut steps = 0usize;
    while (r_end - r) * dir > 0.0 {
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::Integrator { r, reason: format!("exceeded {} steps", tol.max_steps) });
        }
        let remaining = r_end - r;
        if h.abs() > remaining.abs() {
            h = remaining;
        }
        if h.abs() <= 4.0 * f64::EPSILON * r.abs().max(1e-3) {
            return Ok(Trajectory { points, outcome: Outcome::StepCollapse { r } });
        }
        match trial_step(&rhs, r, &y, h, tol) {
            Some((y_new, err)) if err <= 1.0 => {
                r = if (r_end - (r + h)) * dir <= 0.0 { r_end } else { r + h };
                y = y_new;
                points.push((r, y));
                if let Some(stop) = observe(&points) {
                    return Ok(Trajectory { points, outcome: Outcome::Stopped(stop) });
                }
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = (h * factor).clamp(-tol.max_step, tol.max_step);
            }
            Some((_, err)) => {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
            None => h *= 0.25,
        }
    }
    Ok(Trajectory { points, outcome: Outcome::Reached })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_to_tolerance() {
        let rhs = |_r: f64, y: &State<2>| Ok([y[1], -y[0]]);
        let tol = Tolerances { max_step: 1.0, ..Default::default() };
        let t = integrate(rhs, 0.0, [0.0, 1.0], 10.0, &tol, |_| None::<()>).unwrap();
        assert_eq!(t.outcome, Outcome::Reached);
        let (r, y) = *t.points.last().unwrap();
        assert_eq!(r, 10.0);
        assert!((y[0] - 10f64.sin()).abs() < 1e-8);
        assert!((y[1] - 10f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn backward_integration() {
        let rhs = |_r: f64, y: &State<1>| Ok([y[0]]);
        let t = integrate(rhs, 0.0, [1.0], -2.0, &Tolerances::default(), |_| None::<()>).unwrap();
        let (r, y) = *t.points.last().unwrap();
        assert_eq!(r, -2.0);
        assert!((y[0] - (-2f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn pole_collapses_the_step() {
        // y' = y², y(0) = 1 has a pole at r = 1
        let rhs = |_r: f64, y: &State<1>| Ok([y[0] * y[0]]);
        let t = integrate(rhs, 0.0, [1.0], 2.0, &Tolerances::default(), |_| None::<()>).unwrap();
        match t.outcome {
            Outcome::StepCollapse { r } => assert!((r - 1.0).abs() < 1e-6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn observer_can_stop() {
        let rhs = |_r: f64, _y: &State<1>| Ok([1.0]);
        let t = integrate(rhs, 0.0, [0.0], 5.0, &Tolerances::default(), |pts| {
            (pts.last().unwrap().1[0] > 1.0).then_some("crossed")
        })
        .unwrap();
        assert_eq!(t.outcome, Outcome::Stopped("crossed"));
    }
}
