//! Closed-form first and second focal values on the trace-free slice `a1 = K b3`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::CanonicalParams;
use crate::tol::{self, Tolerances, FOCAL_ZERO_TOL};

/// Which formula produced `L2`.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FocalBranch {
    /// `b3 = 0`: every focal value vanishes.
    CaseA_b3Zero,
    /// `D != 0`, `b3 != 0, 1`: six-factor formula.
    CaseB_DNonzero,
    /// `b3 = 1`, `a3 = -1`.
    CaseC1,
    /// `b3 = 1`, `K = 1`: four-factor formula.
    CaseC2,
    /// `L1 != 0`, or no formula applies.
    NotApplicable,
}

impl fmt::Display for FocalBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FocalBranch::CaseA_b3Zero => "a",
            FocalBranch::CaseB_DNonzero => "b",
            FocalBranch::CaseC1 => "c1",
            FocalBranch::CaseC2 => "c2",
            FocalBranch::NotApplicable => "none",
        })
    }
}

/// A polynomial factor appearing in the factorizations of `L1` and `L2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    /// `b3`
    B3,
    /// `a3 + b3`
    A3PlusB3,
    /// `1 + a3 - b3 K`
    OnePlusA3MinusB3K,
    /// `1 - b3 K`
    OneMinusB3K,
    /// `1 - K`
    OneMinusK,
    /// `1 + a3 + K - b3 K`
    OnePlusA3PlusKMinusB3K,
    /// `a3`
    A3,
    /// `1 + a3`
    OnePlusA3,
    /// `1 + b1`
    OnePlusB1,
    /// `a3 - b1`
    A3MinusB1,
}

impl Factor {
    pub fn value(&self, c: &CanonicalParams) -> f64 {
        let CanonicalParams { b1, a3, b3, k, .. } = *c;
        match self {
            Factor::B3 => b3,
            Factor::A3PlusB3 => a3 + b3,
            Factor::OnePlusA3MinusB3K => 1.0 + a3 - b3 * k,
            Factor::OneMinusB3K => 1.0 - b3 * k,
            Factor::OneMinusK => 1.0 - k,
            Factor::OnePlusA3PlusKMinusB3K => 1.0 + a3 + k - b3 * k,
            Factor::A3 => a3,
            Factor::OnePlusA3 => 1.0 + a3,
            Factor::OnePlusB1 => 1.0 + b1,
            Factor::A3MinusB1 => a3 - b1,
        }
    }

    /// Sum of absolute values of the factor's terms.
    fn magnitude(&self, c: &CanonicalParams) -> f64 {
        let CanonicalParams { b1, a3, b3, k, .. } = *c;
        let (b1, a3, b3) = (b1.abs(), a3.abs(), b3.abs());
        match self {
            Factor::B3 => b3,
            Factor::A3PlusB3 => a3 + b3,
            Factor::OnePlusA3MinusB3K => 1.0 + a3 + b3 * k,
            Factor::OneMinusB3K => 1.0 + b3 * k,
            Factor::OneMinusK => 1.0 + k,
            Factor::OnePlusA3PlusKMinusB3K => 1.0 + a3 + k + b3 * k,
            Factor::A3 => a3,
            Factor::OnePlusA3 => 1.0 + a3,
            Factor::OnePlusB1 => 1.0 + b1,
            Factor::A3MinusB1 => a3 + b1,
        }
    }

    /// Value divided by `max(1, term magnitude)`.
    pub fn normalized(&self, c: &CanonicalParams) -> f64 {
        self.value(c) / self.magnitude(c).max(1.0)
    }

    pub fn vanishes(&self, c: &CanonicalParams) -> bool {
        self.vanishes_within(c, FOCAL_ZERO_TOL)
    }

    pub fn vanishes_within(&self, c: &CanonicalParams, zero_tol: f64) -> bool {
        self.normalized(c).abs() <= zero_tol
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Factor::B3 => "b3",
            Factor::A3PlusB3 => "a3+b3",
            Factor::OnePlusA3MinusB3K => "1+a3-b3K",
            Factor::OneMinusB3K => "1-b3K",
            Factor::OneMinusK => "1-K",
            Factor::OnePlusA3PlusKMinusB3K => "1+a3+K-b3K",
            Factor::A3 => "a3",
            Factor::OnePlusA3 => "1+a3",
            Factor::OnePlusB1 => "1+b1",
            Factor::A3MinusB1 => "a3-b1",
        })
    }
}

/// Numerator factors of the six-factor `L2` (the square of `a3 + b3` counted once).
pub const CASE_B_FACTORS: [Factor; 6] = [
    Factor::A3PlusB3,
    Factor::B3,
    Factor::OnePlusA3MinusB3K,
    Factor::OneMinusB3K,
    Factor::OneMinusK,
    Factor::OnePlusA3PlusKMinusB3K,
];

/// Numerator factors of the four-factor `L2`.
pub const CASE_C2_FACTORS: [Factor; 4] = [
    Factor::A3,
    Factor::OnePlusA3,
    Factor::OnePlusB1,
    Factor::A3MinusB1,
];

impl FocalBranch {
    pub fn factors(&self) -> &'static [Factor] {
        match self {
            FocalBranch::CaseA_b3Zero => &[Factor::B3],
            FocalBranch::CaseB_DNonzero => &CASE_B_FACTORS,
            FocalBranch::CaseC1 => &[Factor::OnePlusA3],
            FocalBranch::CaseC2 => &CASE_C2_FACTORS,
            FocalBranch::NotApplicable => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalValues {
    pub l1: f64,
    /// Present only when `L1` vanishes.
    pub l2: Option<f64>,
    /// `D = 1 + a3 - a3 K - b3 K`.
    pub d_value: f64,
    pub branch: FocalBranch,
    /// Smallest numerator factor of `L1`, each scaled to its term magnitude,
    /// signed like the whole numerator. Zero exactly when some factor is.
    pub l1_normalized: f64,
    /// Same normalization for `L2`.
    pub l2_normalized: Option<f64>,
    /// Threshold applied to the normalized values.
    pub zero_tol: f64,
}

impl FocalValues {
    pub fn l1_vanishes(&self) -> bool {
        self.l1_normalized.abs() <= self.zero_tol
    }

    pub fn l2_vanishes(&self) -> bool {
        matches!(self.l2_normalized, Some(v) if v.abs() <= self.zero_tol)
    }

    /// First nonvanishing focal value, if any.
    pub fn leading(&self) -> Option<(usize, f64)> {
        if !self.l1_vanishes() {
            Some((1, self.l1))
        } else {
            match self.l2 {
                Some(l2) if !self.l2_vanishes() => Some((2, l2)),
                _ => None,
            }
        }
    }
}

impl fmt::Display for FocalValues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L1={}", self.l1)?;
        if let Some(l2) = self.l2 {
            write!(f, " L2={l2}")?;
        }
        write!(f, " D={} branch={}", self.d_value, self.branch)
    }
}

pub fn d_value(c: &CanonicalParams) -> f64 {
    1.0 + c.a3 - c.a3 * c.k - c.b3 * c.k
}

/// `b1 D - a3 (1 - b3) K`, the bracket of `L1`.
fn l1_bracket(c: &CanonicalParams) -> (f64, f64) {
    let CanonicalParams { b1, a3, b3, k, .. } = *c;
    let value = b1 * d_value(c) - a3 * (1.0 - b3) * k;
    let mag =
        b1.abs() * (1.0 + a3.abs() + a3.abs() * k + b3.abs() * k) + a3.abs() * (1.0 + b3.abs()) * k;
    (value, mag)
}

/// Smallest `|f|` with the sign of the product.
fn weakest(factors: &[f64]) -> f64 {
    let m = factors
        .iter()
        .map(|f| f.abs())
        .fold(f64::INFINITY, f64::min);
    let neg = factors.iter().filter(|f| **f < 0.0).count() % 2 == 1;
    if neg {
        -m
    } else {
        m
    }
}

fn check_elliptic(c: &CanonicalParams) -> Result<f64> {
    if !tol::trace_is_zero(c.a1, c.b3, c.k) {
        return Err(Error::PreconditionViolated(format!(
            "trace J = {} is not zero",
            c.trace()
        )));
    }
    let det = c.determinant();
    if det <= 0.0 || crate::model::determinant_is_zero(c) {
        return Err(Error::PreconditionViolated(format!(
            "det J = {det} is not positive"
        )));
    }
    Ok(det)
}

pub fn closed_form_focal(c: &CanonicalParams) -> Result<FocalValues> {
    closed_form_focal_with(c, &Tolerances::default())
}

pub fn closed_form_focal_with(c: &CanonicalParams, tols: &Tolerances) -> Result<FocalValues> {
    tols.validate()?;
    let det = check_elliptic(c)?;
    let CanonicalParams { b1, a3, b3, k, .. } = *c;
    let sq = det.sqrt();
    let d = d_value(c);
    let (bracket, bracket_mag) = l1_bracket(c);
    let l1 = PI / 8.0 * k * b3 * bracket / (sq * b1);
    let l1_normalized = weakest(&[Factor::B3.normalized(c), bracket / bracket_mag.max(1.0)]);

    let mut out = FocalValues {
        l1,
        l2: None,
        d_value: d,
        branch: FocalBranch::NotApplicable,
        l1_normalized,
        l2_normalized: None,
        zero_tol: tols.focal_zero,
    };
    if l1_normalized.abs() > tols.focal_zero {
        return Ok(out);
    }

    let b3_zero = tol::approx_zero(b3, tols.case_rel);
    let b3_one = tol::approx_eq(b3, 1.0, tols.case_rel);
    let d_mag = 1.0 + a3.abs() + a3.abs() * k + b3.abs() * k;
    let d_zero = d.abs() <= tols.case_rel * d_mag;

    let (l2, l2n, branch) = if b3_zero {
        (0.0, 0.0, FocalBranch::CaseA_b3Zero)
    } else if b3_one && d_zero {
        // D = (1 + a3)(1 - K) on b3 = 1; pick the factor that actually vanishes.
        let c1 = Factor::OnePlusA3.normalized(c).abs();
        let c2 = Factor::OneMinusK.normalized(c).abs();
        if c1 <= c2 {
            (0.0, 0.0, FocalBranch::CaseC1)
        } else {
            let num = a3 * (1.0 + a3) * (1.0 + b1) * (a3 - b1);
            let l2 = PI / 288.0 * num / (sq * b1);
            let l2n = weakest(&CASE_C2_FACTORS.map(|f| f.normalized(c)));
            (l2, l2n, FocalBranch::CaseC2)
        }
    } else if !d_zero && !b3_one {
        let s = a3 + b3;
        let num =
            s * s * b3 * (1.0 + a3 - b3 * k) * (1.0 - b3 * k) * (1.0 - k) * (1.0 + a3 + k - b3 * k);
        let l2 = PI / 288.0 * num / (sq * d * (1.0 - b3));
        // the squared factor does not change the sign
        let l2n = weakest(&CASE_B_FACTORS.map(|f| f.normalized(c)));
        (l2, l2n, FocalBranch::CaseB_DNonzero)
    } else {
        return Ok(out);
    };
    out.l2 = Some(l2);
    out.l2_normalized = Some(l2n);
    out.branch = branch;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(a1: f64, b1: f64, a3: f64, b3: f64, k: f64) -> CanonicalParams {
        CanonicalParams::new(a1, b1, a3, b3, k).unwrap()
    }

    #[test]
    fn c2_base_points() {
        let f = closed_form_focal(&cp(1.0, 2.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(f.d_value, 0.0);
        assert_eq!(f.l1, 0.0);
        assert_eq!(f.branch, FocalBranch::CaseC2);
        let l2 = f.l2.unwrap();
        assert!((l2 + PI / 96.0).abs() < 1e-15);
        assert!((l2 + 0.032725).abs() < 1e-6);

        let c = cp(1.0, -2.0, -3.0, 1.0, 1.0);
        assert_eq!(c.determinant(), 5.0);
        let f = closed_form_focal(&c).unwrap();
        assert_eq!(f.l1, 0.0);
        assert_eq!(f.branch, FocalBranch::CaseC2);
        assert!((f.l2.unwrap() + PI / (96.0 * 5f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn case_a_has_vanishing_l1() {
        let f = closed_form_focal(&cp(0.0, 1.0, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(f.l1, 0.0);
        assert_eq!(f.branch, FocalBranch::CaseA_b3Zero);
        assert_eq!(f.l2, Some(0.0));
        assert!(f.leading().is_none());
    }

    #[test]
    fn generic_l1_is_nonzero() {
        let c = cp(1.0, -1.0, -2.0, 0.5, 2.0);
        assert_eq!(c.trace(), 0.0);
        let f = closed_form_focal(&c).unwrap();
        // D = 1 - 2 + 4 - 1 = 2, bracket = -1*2 - (-2)(0.5)(2) = 0: the point lies on
        // the L1 = 0 surface, and 1 - b3 K = 0 kills L2 as well (a case (iv) center).
        assert_eq!(f.d_value, 2.0);
        assert!(f.l1_vanishes());
        assert_eq!(f.branch, FocalBranch::CaseB_DNonzero);
        assert!(f.l2_vanishes());
        assert!(Factor::OneMinusB3K.vanishes(&c));
        // moving b1 off the surface gives a nonzero L1
        let f = closed_form_focal(&cp(1.0, -1.5, -2.0, 0.5, 2.0)).unwrap();
        assert!(!f.l1_vanishes());
        assert_eq!(f.branch, FocalBranch::NotApplicable);
        assert!(f.l2.is_none());
        let det: f64 = 2.0 * (3.0 - 0.5);
        let expected = PI / 8.0 * 2.0 * 0.5 * (-1.5 * 2.0 + 2.0) / (det.sqrt() * -1.5);
        assert!((f.l1 - expected).abs() < 1e-15);
    }

    #[test]
    fn c1_reports_zero_l2() {
        // b3 = 1, a3 = -1, a1 = K; det = K(-b1 - K) > 0 needs b1 < -K
        let f = closed_form_focal(&cp(1.5, -3.0, -1.0, 1.0, 1.5)).unwrap();
        assert_eq!(f.branch, FocalBranch::CaseC1);
        assert_eq!(f.l2, Some(0.0));
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            closed_form_focal(&cp(2.0, 1.0, 1.0, 1.0, 1.0)),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            closed_form_focal(&cp(1.0, 1.0, 1.0, 1.0, 1.0)),
            Err(Error::PreconditionViolated(_))
        ));
        // trace 0, det < 0
        assert!(matches!(
            closed_form_focal(&cp(1.0, -1.0, 1.0, 1.0, 1.0)),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn d_identity_on_b3_one() {
        for &(a3, k) in &[(0.3, 1.7), (-1.0, 0.4), (2.0, 1.0), (-2.5, 3.0)] {
            let c = cp(k, 1.0, a3, 1.0, k);
            let lhs = d_value(&c);
            let rhs = (1.0 + a3) * (1.0 - k);
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn l1_sign_near_c2_bases() {
        // on b3 = 1, a1 = K: L1 = (pi/8) K (1+a3)(1-K) / sqrt(det)
        for &(b1, a3, k) in &[(2.0, 1.0, 1.02), (-2.0, -3.0, 1.02), (2.0, 1.0, 0.98)] {
            let c = cp(k, b1, a3, 1.0, k);
            let f = closed_form_focal(&c).unwrap();
            let expected = PI / 8.0 * k * (1.0 + a3) * (1.0 - k) / c.determinant().sqrt();
            assert!((f.l1 - expected).abs() < 1e-14 * expected.abs().max(1.0));
        }
        let f = closed_form_focal(&cp(1.02, 2.0, 1.0, 1.0, 1.02)).unwrap();
        assert!(f.l1 < 0.0);
        let f = closed_form_focal(&cp(1.02, -2.0, -3.0, 1.0, 1.02)).unwrap();
        assert!(f.l1 > 0.0);
        let f = closed_form_focal(&cp(0.98, 2.0, 1.0, 1.0, 0.98)).unwrap();
        assert!(f.l1 > 0.0);
    }
}
