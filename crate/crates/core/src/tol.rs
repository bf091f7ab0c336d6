//! Shared numerical zero tests.

/// Relative tolerance for the parameter equalities of the center cases.
pub const CASE_REL_TOL: f64 = 1e-9;

/// Tolerance on scale-normalized focal values.
pub const FOCAL_ZERO_TOL: f64 = 1e-10;

/// Zero tests of the classification path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative tolerance of the center-case equalities.
    pub case_rel: f64,
    /// Threshold on normalized focal values.
    pub focal_zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            case_rel: CASE_REL_TOL,
            focal_zero: FOCAL_ZERO_TOL,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [
            ("case tolerance", self.case_rel),
            ("focal zero tolerance", self.focal_zero),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(crate::Error::InvalidParameter(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// `|a - b| <= rel * max(1, |a|, |b|)`.
pub fn approx_eq(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * 1f64.max(a.abs()).max(b.abs())
}

pub fn approx_zero(a: f64, rel: f64) -> bool {
    approx_eq(a, 0.0, rel)
}

/// Scale-relative zero test for the Jacobian trace `a1 - K b3`.
pub fn trace_is_zero(a1: f64, b3: f64, k: f64) -> bool {
    (a1 - k * b3).abs() <= 1e-12 * (1.0 + a1.abs() + k * b3.abs())
}

/// Sign with a dead zone: 0 when `|v| <= zero`.
pub fn sign(v: f64, zero: f64) -> i8 {
    if v > zero {
        1
    } else if v < -zero {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_comparison_scales() {
        assert!(approx_eq(1e12, 1e12 + 1.0, 1e-9));
        assert!(!approx_eq(1.0, 1.0 + 1e-8, 1e-9));
        assert!(approx_zero(1e-10, 1e-9));
    }

    #[test]
    fn trace_zero_is_scale_relative() {
        assert!(trace_is_zero(1.0, 0.5, 2.0));
        assert!(trace_is_zero(3.0 * 0.1, 0.1, 3.0));
        assert!(!trace_is_zero(1.0, 0.5, 2.000001));
    }
}
