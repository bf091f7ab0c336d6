//! Dormand–Prince 5(4) integration on the open positive quadrant.

use crate::error::{Error, Result};
use crate::model::{CanonicalParams, Point};

/// A planar vector field, NaN off its domain.
pub trait PlanarField {
    fn eval(&self, x: f64, y: f64) -> (f64, f64);
}

impl PlanarField for CanonicalParams {
    #[inline]
    fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        self.field(x, y)
    }
}

impl<F: PlanarField + ?Sized> PlanarField for &F {
    #[inline]
    fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (**self).eval(x, y)
    }
}

/// The same field with time reversed.
#[derive(Debug, Clone, Copy)]
pub struct Reversed<F>(pub F);

impl<F: PlanarField> PlanarField for Reversed<F> {
    #[inline]
    fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let (fx, fy) = self.0.eval(x, y);
        (-fx, -fy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub max_steps: usize,
    pub h_max: f64,
}

impl IntegratorOptions {
    pub const DEFAULT_MAX_STEPS: usize = 10_000_000;

    pub fn new(rel_tol: f64) -> Result<Self> {
        if !(1e-13..=1e-3).contains(&rel_tol) {
            return Err(Error::InvalidParameter(format!(
                "relTol {rel_tol} outside [1e-13, 1e-3]"
            )));
        }
        Ok(IntegratorOptions {
            rel_tol,
            max_steps: Self::DEFAULT_MAX_STEPS,
            h_max: f64::INFINITY,
        })
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    TimeLimit,
    SectionReturn,
    QuadrantEscape,
    StepBudget,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Rejections caused by stages leaving the quadrant.
    pub positivity_rejections: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Point>,
    pub stats: StepStats,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> Point {
        *self.points.last().expect("trajectory is never empty")
    }

    /// Delimited text with columns `t,x,y`.
    pub fn to_delimited(&self, sep: char) -> String {
        let mut out = format!("t{sep}x{sep}y\n");
        for (t, p) in self.times.iter().zip(&self.points) {
            out.push_str(&format!("{t:e}{sep}{:e}{sep}{:e}\n", p.x, p.y));
        }
        out
    }
}

// Dormand–Prince coefficients.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type V2 = [f64; 2];

#[inline]
fn axpy(y: V2, terms: &[(f64, V2)], h: f64) -> V2 {
    let mut out = y;
    for (a, k) in terms {
        out[0] += h * a * k[0];
        out[1] += h * a * k[1];
    }
    out
}

#[inline]
fn eval<F: PlanarField>(f: &F, y: V2) -> V2 {
    let (a, b) = f.eval(y[0], y[1]);
    [a, b]
}

fn finite(v: V2) -> bool {
    v[0].is_finite() && v[1].is_finite()
}

fn positive(v: V2) -> bool {
    v[0] > 0.0 && v[1] > 0.0 && finite(v)
}

/// One accepted step, kept for dense output and event location.
#[derive(Debug, Clone, Copy)]
pub struct AcceptedStep {
    pub t0: f64,
    pub y0: V2,
    pub f0: V2,
    pub h: f64,
    pub y1: V2,
    pub f1: V2,
}

impl AcceptedStep {
    /// Cubic Hermite interpolant at `t0 + theta h`.
    pub fn hermite(&self, theta: f64) -> V2 {
        let (t, h) = (theta, self.h);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        [
            h00 * self.y0[0] + h10 * h * self.f0[0] + h01 * self.y1[0] + h11 * h * self.f1[0],
            h00 * self.y0[1] + h10 * h * self.f0[1] + h01 * self.y1[1] + h11 * h * self.f1[1],
        ]
    }
}

#[derive(Debug)]
pub enum StepOutcome {
    Accepted(AcceptedStep),
    Escape,
    Budget,
}

/// Adaptive stepper with FSAL and a positivity guard.
pub struct Stepper<F> {
    field: F,
    opts: IntegratorOptions,
    pub t: f64,
    pub y: V2,
    f: V2,
    h: f64,
    pub stats: StepStats,
}

impl<F: PlanarField> Stepper<F> {
    pub fn new(field: F, t0: f64, start: Point, opts: IntegratorOptions) -> Result<Self> {
        let y = [start.x, start.y];
        let f = eval(&field, y);
        if !finite(f) {
            return Err(Error::IntegrationFailure(
                "field is not finite at the start point".into(),
            ));
        }
        let mut s = Stepper {
            field,
            opts,
            t: t0,
            y,
            f,
            h: 0.0,
            stats: StepStats::default(),
        };
        s.h = s.initial_step();
        Ok(s)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    fn scale(&self, i: usize, a: V2, b: V2) -> f64 {
        self.opts.rel_tol * 1f64.max(a[i].abs()).max(b[i].abs())
    }

    fn initial_step(&self) -> f64 {
        let sc = [self.scale(0, self.y, self.y), self.scale(1, self.y, self.y)];
        let norm = |v: V2| (((v[0] / sc[0]).powi(2) + (v[1] / sc[1]).powi(2)) / 2.0).sqrt();
        let d0 = norm(self.y);
        let d1 = norm(self.f);
        if d1 <= 1e-10 {
            return self.opts.h_max.min(1.0);
        }
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let y1 = axpy(self.y, &[(1.0, self.f)], h0);
        let f1 = eval(&self.field, y1);
        if !positive(y1) || !finite(f1) {
            return h0 * 1e-2;
        }
        let d2 = norm([f1[0] - self.f[0], f1[1] - self.f[1]]) / h0;
        let dm = d1.max(d2);
        let h1 = if dm <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / dm).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.opts.h_max)
    }

    /// A single Dormand–Prince step of size `h` from `(y, f)`; returns the
    /// fifth-order solution, its derivative and the error estimate.
    fn raw_step(&self, y: V2, f: V2, h: f64) -> Option<(V2, V2, V2)> {
        let k1 = f;
        let y2 = axpy(y, &[(A21, k1)], h);
        let k2 = eval(&self.field, y2);
        let y3 = axpy(y, &[(A31, k1), (A32, k2)], h);
        let k3 = eval(&self.field, y3);
        let y4 = axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], h);
        let k4 = eval(&self.field, y4);
        let y5 = axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h);
        let k5 = eval(&self.field, y5);
        let y6 = axpy(
            y,
            &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
            h,
        );
        let k6 = eval(&self.field, y6);
        let y7 = axpy(
            y,
            &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
            h,
        );
        let k7 = eval(&self.field, y7);
        for (yy, kk) in [(y2, k2), (y3, k3), (y4, k4), (y5, k5), (y6, k6), (y7, k7)] {
            if !positive(yy) || !finite(kk) {
                return None;
            }
        }
        let err = [
            h * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0]),
            h * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1]),
        ];
        Some((y7, k7, err))
    }

    /// Re-integrates `s` time units from the start of `step` with one step.
    pub fn substep(&self, step: &AcceptedStep, s: f64) -> V2 {
        if s == 0.0 {
            return step.y0;
        }
        match self.raw_step(step.y0, step.f0, s) {
            Some((y, _, _)) => y,
            None => step.hermite(s / step.h),
        }
    }

    /// Advances by one accepted step, never past `t_end`.
    pub fn step(&mut self, t_end: f64) -> StepOutcome {
        const SAFETY: f64 = 0.9;
        loop {
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return StepOutcome::Budget;
            }
            let mut h = self.h.min(self.opts.h_max);
            let mut last = false;
            if self.t + h >= t_end {
                h = t_end - self.t;
                last = true;
            }
            if h <= 1e-14 * self.t.abs().max(1.0) && !last {
                return StepOutcome::Escape;
            }
            match self.raw_step(self.y, self.f, h) {
                None => {
                    self.stats.rejected += 1;
                    self.stats.positivity_rejections += 1;
                    self.h = h * 0.5;
                    if self.h <= 1e-14 * self.t.abs().max(1.0) {
                        return StepOutcome::Escape;
                    }
                }
                Some((y1, f1, e)) => {
                    let sc = [self.scale(0, self.y, y1), self.scale(1, self.y, y1)];
                    let err = (((e[0] / sc[0]).powi(2) + (e[1] / sc[1]).powi(2)) / 2.0).sqrt();
                    let fac = if err == 0.0 {
                        5.0
                    } else {
                        (SAFETY * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    if err <= 1.0 {
                        let step = AcceptedStep {
                            t0: self.t,
                            y0: self.y,
                            f0: self.f,
                            h,
                            y1,
                            f1,
                        };
                        self.t = if last { t_end } else { self.t + h };
                        self.y = y1;
                        self.f = f1;
                        self.stats.accepted += 1;
                        // keep the proposal from before truncation at t_end
                        if !last {
                            self.h = h * fac;
                        }
                        return StepOutcome::Accepted(step);
                    }
                    self.stats.rejected += 1;
                    self.h = h * fac.min(1.0);
                }
            }
        }
    }
}

/// Integrates `field` from `start` over `[0, t_max]`, recording every accepted step.
pub fn integrate_field<F: PlanarField>(
    field: F,
    start: Point,
    t_max: f64,
    opts: IntegratorOptions,
) -> Result<Trajectory> {
    let start = Point::new(start.x, start.y)?;
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tMax must be positive, got {t_max}"
        )));
    }
    let mut stepper = Stepper::new(field, 0.0, start, opts)?;
    let mut times = vec![0.0];
    let mut points = vec![start];
    let termination = loop {
        if stepper.t >= t_max {
            break Termination::TimeLimit;
        }
        match stepper.step(t_max) {
            StepOutcome::Accepted(s) => {
                times.push(stepper.t);
                points.push(Point {
                    x: s.y1[0],
                    y: s.y1[1],
                });
            }
            StepOutcome::Escape => break Termination::QuadrantEscape,
            StepOutcome::Budget => break Termination::StepBudget,
        }
    };
    Ok(Trajectory {
        times,
        points,
        stats: stepper.stats,
        termination,
    })
}

pub fn integrate(
    c: &CanonicalParams,
    start: Point,
    t_max: f64,
    rel_tol: f64,
) -> Result<Trajectory> {
    integrate_field(*c, start, t_max, IntegratorOptions::new(rel_tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn linear_center_returns_after_two_pi() {
        // u' = v, v' = -u in shifted coordinates
        let c = CanonicalParams::new(0.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let traj = integrate(&c, Point { x: 1.1, y: 1.0 }, 2.0 * PI, 1e-12).unwrap();
        assert_eq!(traj.termination, Termination::TimeLimit);
        let end = traj.last();
        assert!(
            (end.x - 1.1).abs() < 1e-8 && (end.y - 1.0).abs() < 1e-8,
            "{end:?}"
        );
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn equilibrium_is_stationary() {
        let c = CanonicalParams::new(0.3, -1.2, 0.7, 2.0, 0.4).unwrap();
        let traj = integrate(&c, Point::EQUILIBRIUM, 10.0, 1e-10).unwrap();
        assert!(traj.points.iter().all(|p| *p == Point::EQUILIBRIUM));
        assert_eq!(*traj.times.last().unwrap(), 10.0);
    }

    #[test]
    fn escape_is_reported() {
        // x' = -1 drives x to zero in unit time
        struct Drain;
        impl PlanarField for Drain {
            fn eval(&self, x: f64, y: f64) -> (f64, f64) {
                if x <= 0.0 || y <= 0.0 {
                    (f64::NAN, f64::NAN)
                } else {
                    (-1.0, 0.0)
                }
            }
        }
        let traj = integrate_field(
            Drain,
            Point { x: 0.5, y: 1.0 },
            5.0,
            IntegratorOptions::new(1e-9).unwrap(),
        )
        .unwrap();
        assert_eq!(traj.termination, Termination::QuadrantEscape);
        assert!(traj.points.iter().all(|p| p.x > 0.0 && p.y > 0.0));
        assert!(traj.stats.positivity_rejections > 0);
    }

    #[test]
    fn step_budget_is_reported() {
        let c = CanonicalParams::new(0.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let opts = IntegratorOptions::new(1e-10).unwrap().with_max_steps(5);
        let traj = integrate_field(c, Point { x: 1.2, y: 1.0 }, 100.0, opts).unwrap();
        assert_eq!(traj.termination, Termination::StepBudget);
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        assert!(IntegratorOptions::new(1e-2).is_err());
        assert!(IntegratorOptions::new(1e-14).is_err());
    }

    #[test]
    fn delimited_export_round_trips_values() {
        let c = CanonicalParams::new(0.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let traj = integrate(&c, Point { x: 1.1, y: 1.0 }, 1.0, 1e-8).unwrap();
        let text = traj.to_delimited(',');
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows[0], "t,x,y");
        assert_eq!(rows.len(), traj.points.len() + 1);
        let last: Vec<f64> = rows
            .last()
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        assert_eq!(
            last,
            vec![*traj.times.last().unwrap(), traj.last().x, traj.last().y]
        );
    }
}
