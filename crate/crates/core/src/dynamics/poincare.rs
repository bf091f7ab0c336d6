//! First-return maps on a transversal through the equilibrium.

use std::f64::consts::PI;
use std::fmt;

use super::integrator::{
    AcceptedStep, IntegratorOptions, PlanarField, StepOutcome, Stepper, Termination, Trajectory,
};
use crate::error::{Error, Result};
use crate::model::{CanonicalParams, Point};

/// Maximum refinements when locating a section crossing.
const MAX_REFINEMENTS: usize = 60;
/// Target `|g|` for a located crossing.
const CROSSING_TOL: f64 = 1e-12;

/// Half-line through `(1, 1)` used as the return section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    /// `{y = 1, x > 1}`
    Horizontal,
    /// `{x = 1, y > 1}`
    Vertical,
}

impl Section {
    /// `{y = 1}` is transversal unless `a3 = 0`, in which case `y' = 0` along it.
    pub fn for_params(c: &CanonicalParams) -> Section {
        if c.a3.abs() > 1e-9 {
            Section::Horizontal
        } else {
            Section::Vertical
        }
    }

    pub fn point(&self, s: f64) -> Point {
        match self {
            Section::Horizontal => Point { x: s, y: 1.0 },
            Section::Vertical => Point { x: 1.0, y: s },
        }
    }

    /// Signed distance from the section line.
    #[inline]
    fn g(&self, y: [f64; 2]) -> f64 {
        match self {
            Section::Horizontal => y[1] - 1.0,
            Section::Vertical => y[0] - 1.0,
        }
    }

    #[inline]
    fn coord(&self, y: [f64; 2]) -> f64 {
        match self {
            Section::Horizontal => y[0],
            Section::Vertical => y[1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnRecord {
    pub section: Section,
    /// Section coordinate of the start (x for the horizontal section).
    pub start_x: f64,
    pub return_x: f64,
    pub displacement: f64,
    pub return_time: f64,
    /// Section-line crossings up to and including the return.
    pub crossings: usize,
}

impl fmt::Display for ReturnRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let section = match self.section {
            Section::Horizontal => "y=1",
            Section::Vertical => "x=1",
        };
        write!(
            f,
            "section={section} start={} return={} displacement={:e} time={} crossings={}",
            self.start_x, self.return_x, self.displacement, self.return_time, self.crossings
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnOptions {
    pub rel_tol: f64,
    /// Time limit for one return; defaults to 50 linear periods.
    pub t_max: Option<f64>,
    pub max_steps: usize,
}

impl ReturnOptions {
    pub fn new(rel_tol: f64) -> Self {
        ReturnOptions {
            rel_tol,
            t_max: None,
            max_steps: IntegratorOptions::DEFAULT_MAX_STEPS,
        }
    }
}

/// Linear frequency used for period estimates; falls back to 1 off the elliptic region.
pub fn linear_frequency(c: &CanonicalParams) -> f64 {
    let tr = c.trace();
    let w2 = c.determinant() - tr * tr / 4.0;
    if w2 > 0.0 {
        w2.sqrt()
    } else {
        1.0
    }
}

/// Locates `g = 0` inside an accepted step by re-integrating from its start.
fn locate<F: PlanarField>(
    stepper: &Stepper<F>,
    step: &AcceptedStep,
    section: Section,
) -> (f64, [f64; 2]) {
    let g0 = section.g(step.y0);
    let g1 = section.g(step.y1);
    // Hermite guess by bisection on the interpolant.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        let gm = section.g(step.hermite(mid));
        if (gm < 0.0) == (g0 < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut guess = 0.5 * (lo + hi) * step.h;

    // Illinois iteration on exact sub-steps.
    let (mut a, mut ga) = (0.0, g0);
    let (mut b, mut gb) = (step.h, g1);
    let mut best = (step.h, step.y1, g1.abs());
    let mut side = 0;
    for _ in 0..MAX_REFINEMENTS {
        if !(guess > a && guess < b) {
            guess = 0.5 * (a + b);
        }
        let y = stepper.substep(step, guess);
        let g = section.g(y);
        if g.abs() < best.2 {
            best = (guess, y, g.abs());
        }
        if g.abs() <= CROSSING_TOL || b - a <= 1e-15 * step.h {
            break;
        }
        if (g < 0.0) == (ga < 0.0) {
            a = guess;
            ga = g;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = guess;
            gb = g;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
        guess = (a * gb - b * ga) / (gb - ga);
    }
    (step.t0 + best.0, best.1)
}

/// Integrates from the section point `s0` until the orbit crosses the
/// section again in the same direction on the same half-line.
pub fn first_return<F: PlanarField>(
    field: F,
    section: Section,
    s0: f64,
    t_max: f64,
    opts: &ReturnOptions,
    mut orbit: Option<&mut Trajectory>,
) -> Result<ReturnRecord> {
    if !(s0 > 1.0 && s0.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "section start must exceed 1, got {s0}"
        )));
    }
    let start = section.point(s0);
    let iopts = IntegratorOptions::new(opts.rel_tol)?.with_max_steps(opts.max_steps);
    let mut stepper = Stepper::new(field, 0.0, start, iopts)?;
    let (fx, fy) = stepper.field().eval(start.x, start.y);
    let dir = match section {
        Section::Horizontal => fy,
        Section::Vertical => fx,
    };
    if dir == 0.0 || !dir.is_finite() {
        return Err(Error::PreconditionViolated(
            "flow is tangent to the section at the start".into(),
        ));
    }
    let dir = dir.signum();
    if let Some(o) = orbit.as_deref_mut() {
        o.times.clear();
        o.points.clear();
        o.times.push(0.0);
        o.points.push(start);
    }
    let mut crossings = 0;
    loop {
        let step = match stepper.step(t_max) {
            StepOutcome::Accepted(s) => s,
            StepOutcome::Escape => {
                return Err(Error::NoReturn(format!(
                    "orbit from {s0} left the positive quadrant"
                )));
            }
            StepOutcome::Budget => return Err(Error::NoReturn("step budget exhausted".into())),
        };
        let g0 = dir * section.g(step.y0);
        let g1 = dir * section.g(step.y1);
        let leaves_start = step.t0 == 0.0 && g0 == 0.0;
        if !leaves_start && (g0 > 0.0) != (g1 > 0.0) {
            crossings += 1;
            if g0 < 0.0 && g1 >= 0.0 {
                let (t, y) = locate(&stepper, &step, section);
                let sx = section.coord(y);
                if sx > 1.0 {
                    if let Some(o) = orbit.as_deref_mut() {
                        o.times.push(t);
                        o.points.push(Point { x: y[0], y: y[1] });
                        o.stats = stepper.stats;
                        o.termination = Termination::SectionReturn;
                    }
                    return Ok(ReturnRecord {
                        section,
                        start_x: s0,
                        return_x: sx,
                        displacement: sx - s0,
                        return_time: t,
                        crossings,
                    });
                }
            }
        }
        if let Some(o) = orbit.as_deref_mut() {
            o.times.push(stepper.t);
            o.points.push(Point {
                x: step.y1[0],
                y: step.y1[1],
            });
        }
        if stepper.t >= t_max {
            return Err(Error::NoReturn(format!("no return within t = {t_max}")));
        }
    }
}

pub fn poincare_return_with(
    c: &CanonicalParams,
    x0: f64,
    opts: &ReturnOptions,
) -> Result<ReturnRecord> {
    c.validate()?;
    let t_max = opts.t_max.unwrap_or(50.0 * 2.0 * PI / linear_frequency(c));
    first_return(*c, Section::for_params(c), x0, t_max, opts, None)
}

/// One return from `(x0, 1)` (or `(1, x0)` when `a3 = 0`).
pub fn poincare_return(c: &CanonicalParams, x0: f64, rel_tol: f64) -> Result<ReturnRecord> {
    poincare_return_with(c, x0, &ReturnOptions::new(rel_tol))
}

/// Like [`poincare_return`] but also returns the sampled orbit.
pub fn return_orbit(
    c: &CanonicalParams,
    x0: f64,
    rel_tol: f64,
) -> Result<(ReturnRecord, Trajectory)> {
    c.validate()?;
    let opts = ReturnOptions::new(rel_tol);
    let t_max = 50.0 * 2.0 * PI / linear_frequency(c);
    let mut traj = Trajectory {
        times: Vec::new(),
        points: Vec::new(),
        stats: Default::default(),
        termination: Termination::TimeLimit,
    };
    let rec = first_return(
        *c,
        Section::for_params(c),
        x0,
        t_max,
        &opts,
        Some(&mut traj),
    )?;
    Ok((rec, traj))
}
