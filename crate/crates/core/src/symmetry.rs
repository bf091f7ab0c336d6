//! Reversibility under the reflection `R(x, y) = (y, x)`.
//!
//! Case (r1) is reversible as given. Case (r2) becomes reversible after
//! `u = x^K`, `v = 1/y` and multiplication by the positive factor `K^-1 v^b1`.

use crate::dynamics::integrator::{
    integrate_field, IntegratorOptions, PlanarField, Reversed, Termination,
};
use crate::error::{Error, Result};
use crate::model::{CanonicalParams, Point};
use crate::tol::{approx_eq, CASE_REL_TOL};

pub fn reflection(pt: Point) -> Point {
    Point { x: pt.y, y: pt.x }
}

/// Largest `|G(R p) + R G(p)| / max(1, |G(p)|)` over `pts`.
pub fn reflection_residual<F: PlanarField>(field: &F, pts: &[Point]) -> f64 {
    pts.iter()
        .map(|p| {
            let (gx, gy) = field.eval(p.x, p.y);
            let (rx, ry) = field.eval(p.y, p.x);
            let err = (rx + gy).hypot(ry + gx);
            err / gx.hypot(gy).max(1.0)
        })
        .fold(0.0, f64::max)
}

fn is_r1(c: &CanonicalParams) -> bool {
    let eq = |a: f64, b: f64| approx_eq(a, b, CASE_REL_TOL);
    eq(c.a1, c.b3) && eq(c.a3, c.b1) && eq(c.k, 1.0)
}

pub fn r1_residual(c: &CanonicalParams, pts: &[Point]) -> Result<f64> {
    c.validate()?;
    if !is_r1(c) {
        return Err(Error::CaseMismatch(
            "reflection identity needs a1 = b3, a3 = b1, K = 1".into(),
        ));
    }
    Ok(reflection_residual(c, pts))
}

/// The rescaled (u, v) field of case (r2):
/// `u' = u^(e+b3) - u^e v^b1`, `v' = -v^(2+b1) + u^b1 v^(2+b1-b3)` with `e = 1 - 1/K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedField {
    pub u_exponents: (f64, f64, f64),
    pub v_exponents: (f64, f64, f64),
    pub source: CanonicalParams,
}

impl PlanarField for TransformedField {
    fn eval(&self, u: f64, v: f64) -> (f64, f64) {
        let (lu, lv) = (u.ln(), v.ln());
        let (p0, p1, q1) = self.u_exponents;
        let (r0, s1, r1) = self.v_exponents;
        let du = (p0 * lu).exp() - (p1 * lu + q1 * lv).exp();
        let dv = -(r0 * lv).exp() + (s1 * lu + r1 * lv).exp();
        (du, dv)
    }
}

impl TransformedField {
    /// `(x, y) -> (x^K, 1/y)`.
    pub fn map(&self, pt: Point) -> Point {
        Point {
            x: pt.x.powf(self.source.k),
            y: 1.0 / pt.y,
        }
    }

    /// Largest relative mismatch between `G(Φ(p))` and the rescaled
    /// pushforward `K^-1 y^-b1 DΦ(p) F(p)`.
    pub fn pushforward_residual(&self, pts: &[Point]) -> f64 {
        let c = &self.source;
        pts.iter()
            .map(|&p| {
                let (fx, fy) = c.field(p.x, p.y);
                let w = p.y.powf(-c.b1) / c.k;
                let push = (w * c.k * p.x.powf(c.k - 1.0) * fx, -w * fy / (p.y * p.y));
                let q = self.map(p);
                let g = self.eval(q.x, q.y);
                (g.0 - push.0).hypot(g.1 - push.1) / g.0.hypot(g.1).max(1.0)
            })
            .fold(0.0, f64::max)
    }
}

pub fn r2_transform(c: &CanonicalParams) -> Result<TransformedField> {
    c.validate()?;
    let CanonicalParams { a1, b1, a3, b3, k } = *c;
    let denom = b3 - b1 - 1.0;
    if approx_eq(denom, 0.0, CASE_REL_TOL) {
        return Err(Error::DegenerateK);
    }
    let eq = |a: f64, b: f64| approx_eq(a, b, CASE_REL_TOL);
    if !(eq(a1, k * b3) && eq(a3, k * b1) && eq(k * denom, 1.0)) {
        return Err(Error::CaseMismatch(
            "(r2) needs a1 = K b3, a3 = K b1, K = 1/(b3 - b1 - 1)".into(),
        ));
    }
    let e = 1.0 - 1.0 / k;
    let e_alt = 2.0 + b1 - b3;
    if (e - e_alt).abs() > 1e-12 * (1.0 + e.abs()) {
        return Err(Error::InternalInconsistency(format!(
            "exponent identity fails: {e} vs {e_alt}"
        )));
    }
    Ok(TransformedField {
        u_exponents: (e + b3, e, b1),
        v_exponents: (2.0 + b1, b1, e_alt),
        source: *c,
    })
}

pub fn r2_residual(c: &CanonicalParams, pts: &[Point]) -> Result<f64> {
    let g = r2_transform(c)?;
    Ok(reflection_residual(&g, pts))
}

/// Distance between `R φ_t(p)` and `φ_-t(R p)`; zero for a reversible field.
pub fn trajectory_reversibility_error<F: PlanarField + Copy>(
    field: F,
    p: Point,
    t: f64,
    rel_tol: f64,
) -> Result<f64> {
    let opts = IntegratorOptions::new(rel_tol)?;
    let fwd = integrate_field(field, p, t, opts)?;
    if fwd.termination != Termination::TimeLimit {
        return Err(Error::IntegrationFailure(format!(
            "forward run ended with {:?}",
            fwd.termination
        )));
    }
    let back = integrate_field(Reversed(field), reflection(p), t, opts)?;
    if back.termination != Termination::TimeLimit {
        return Err(Error::IntegrationFailure(format!(
            "backward run ended with {:?}",
            back.termination
        )));
    }
    let end = back.last();
    let target = reflection(fwd.last());
    Ok((end.x - target.x).hypot(end.y - target.y))
}
