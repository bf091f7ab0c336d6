//! Sign of the leading focal value from one numerical return.

use crate::dynamics::poincare::{poincare_return_with, ReturnOptions};
use crate::error::{Error, Result};
use crate::model::CanonicalParams;
use crate::tol::trace_is_zero;

/// Integrator tolerance of the primary return.
const PROBE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignProbe {
    /// `-1`, `0` or `+1`; 0 when the displacement is inside its error bar.
    pub sign: i8,
    pub displacement: f64,
    /// Difference to a return at 100x looser tolerance plus a tolerance floor.
    pub error_bar: f64,
}

fn displacement(c: &CanonicalParams, r: f64, rel_tol: f64) -> Result<f64> {
    match poincare_return_with(c, 1.0 + r, &ReturnOptions::new(rel_tol)) {
        Ok(rec) => Ok(rec.displacement),
        Err(Error::NoReturn(msg)) => Err(Error::IntegrationFailure(msg)),
        Err(e) => Err(e),
    }
}

pub fn return_map_sign_probe(c: &CanonicalParams, radius: f64) -> Result<SignProbe> {
    c.validate()?;
    if !trace_is_zero(c.a1, c.b3, c.k) || !(c.determinant() > 0.0) {
        return Err(Error::PreconditionViolated(
            "sign probe needs trace 0 and det > 0".into(),
        ));
    }
    if !(radius > 0.0 && radius <= 0.2) {
        return Err(Error::InvalidParameter(format!(
            "radius must lie in (0, 0.2], got {radius}"
        )));
    }
    let d = displacement(c, radius, PROBE_REL_TOL)?;
    let loose = displacement(c, radius, PROBE_REL_TOL * 100.0)?;
    let half = displacement(c, 0.5 * radius, PROBE_REL_TOL)?;
    // integration noise, plus a floor set by the tolerance itself
    let noise = (d - loose).abs() + 10.0 * PROBE_REL_TOL * (1.0 + radius);
    // a genuine leading term keeps its sign when the radius is halved
    let sign = if d.abs() <= noise || (half.abs() > noise && half.signum() != d.signum()) {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    };
    Ok(SignProbe {
        sign,
        displacement: d,
        error_bar: noise,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(a1: f64, b1: f64, a3: f64, b3: f64, k: f64) -> CanonicalParams {
        CanonicalParams::new(a1, b1, a3, b3, k).unwrap()
    }

    #[test]
    fn center_gives_zero() {
        let p = return_map_sign_probe(&cp(0.0, 1.0, 1.0, 0.0, 2.0), 0.1).unwrap();
        assert_eq!(p.sign, 0, "{p:?}");
    }

    #[test]
    fn weak_focus_signs() {
        // L1 ∝ (1 + a3)(1 - K) on b3 = 1, a1 = K
        assert_eq!(
            return_map_sign_probe(&cp(1.02, 2.0, 1.0, 1.0, 1.02), 0.05)
                .unwrap()
                .sign,
            -1
        );
        assert_eq!(
            return_map_sign_probe(&cp(0.98, 2.0, 1.0, 1.0, 0.98), 0.05)
                .unwrap()
                .sign,
            1
        );
        assert_eq!(
            return_map_sign_probe(&cp(1.02, -2.0, -3.0, 1.0, 1.02), 0.05)
                .unwrap()
                .sign,
            1
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(return_map_sign_probe(&cp(2.0, 1.0, 1.0, 1.0, 1.0), 0.1).is_err());
        assert!(return_map_sign_probe(&cp(0.0, 1.0, 1.0, 0.0, 1.0), 0.3).is_err());
    }
}
