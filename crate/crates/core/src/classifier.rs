//! Center / focus decision and the six algebraic center cases.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::focal::{closed_form_focal_with, Factor, FocalBranch, FocalValues};
use crate::model::{determinant_is_zero, CanonicalParams};
use crate::tol::{approx_eq, approx_zero, trace_is_zero, Tolerances, CASE_REL_TOL, FOCAL_ZERO_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinearType {
    EllipticCandidate,
    DegenerateDetZero,
    NotElliptic,
}

pub fn linear_type(c: &CanonicalParams) -> LinearType {
    if determinant_is_zero(c) {
        LinearType::DegenerateDetZero
    } else if trace_is_zero(c.a1, c.b3, c.k) && c.determinant() > 0.0 {
        LinearType::EllipticCandidate
    } else {
        LinearType::NotElliptic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CenterCase {
    I,
    II,
    III,
    IV,
    R1,
    R2,
}

impl CenterCase {
    pub const ALL: [CenterCase; 6] = [
        CenterCase::I,
        CenterCase::II,
        CenterCase::III,
        CenterCase::IV,
        CenterCase::R1,
        CenterCase::R2,
    ];

    /// Whether the row's equalities hold (relative tolerance) and whether its
    /// strict inequality holds.
    pub fn status(&self, c: &CanonicalParams) -> (bool, bool) {
        self.status_with(c, CASE_REL_TOL)
    }

    pub fn status_with(&self, c: &CanonicalParams, rel: f64) -> (bool, bool) {
        let CanonicalParams { a1, b1, a3, b3, k } = *c;
        let eq = |a: f64, b: f64| approx_eq(a, b, rel);
        match self {
            CenterCase::I => (approx_zero(a1, rel) && approx_zero(b3, rel), a3 * b1 > 0.0),
            CenterCase::II => (
                eq(a1, a3 + 1.0) && eq(b3, b1 + 1.0) && !approx_zero(b3, rel) && eq(k * b3, a1),
                a1 + b3 < 1.0,
            ),
            CenterCase::III => (eq(a3, -1.0) && eq(b3, 1.0) && eq(k, a1), a1 + b1 < 0.0),
            CenterCase::IV => (
                eq(a1, 1.0) && eq(b1, -1.0) && eq(k * b3, 1.0),
                a3 + b3 < 0.0,
            ),
            CenterCase::R1 => (eq(a1, b3) && eq(a3, b1) && eq(k, 1.0), a1.abs() < b1.abs()),
            CenterCase::R2 => (
                eq(a1, k * b3) && eq(a3, k * b1) && eq(k * (b3 - b1 - 1.0), 1.0),
                b3.abs() < b1.abs(),
            ),
        }
    }

    pub fn matches(&self, c: &CanonicalParams) -> bool {
        self.status(c) == (true, true)
    }

    pub fn matches_with(&self, c: &CanonicalParams, rel: f64) -> bool {
        self.status_with(c, rel) == (true, true)
    }
}

impl fmt::Display for CenterCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CenterCase::I => "I",
            CenterCase::II => "II",
            CenterCase::III => "III",
            CenterCase::IV => "IV",
            CenterCase::R1 => "R1",
            CenterCase::R2 => "R2",
        })
    }
}

/// Every center case whose constraints hold. K > 0 is part of `c`'s validity.
pub fn match_table_cases(c: &CanonicalParams) -> BTreeSet<CenterCase> {
    match_table_cases_with(c, CASE_REL_TOL)
}

pub fn match_table_cases_with(c: &CanonicalParams, rel: f64) -> BTreeSet<CenterCase> {
    CenterCase::ALL
        .into_iter()
        .filter(|case| case.matches_with(c, rel))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Center,
    FocusStable,
    FocusUnstable,
    WeakFocusOrder2Plus,
    NotElliptic,
    DegenerateDetZero,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Which subcase of the focal-value factorization fired.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Not on the elliptic slice.
    Linear(LinearType),
    /// `L1 != 0`.
    FirstFocalValue,
    /// `L1 = 0`; the branch and those of its numerator factors that vanish.
    Branch {
        branch: FocalBranch,
        vanished: Vec<Factor>,
    },
}

impl Witness {
    fn from_focal(c: &CanonicalParams, f: &FocalValues) -> Witness {
        if !f.l1_vanishes() {
            return Witness::FirstFocalValue;
        }
        let vanished = f
            .branch
            .factors()
            .iter()
            .copied()
            .filter(|x| x.vanishes_within(c, f.zero_tol))
            .collect();
        Witness::Branch {
            branch: f.branch,
            vanished,
        }
    }

    /// True when every recorded factor vanishes at `c`.
    pub fn is_consistent(&self, c: &CanonicalParams) -> bool {
        self.is_consistent_within(c, FOCAL_ZERO_TOL)
    }

    pub fn is_consistent_within(&self, c: &CanonicalParams, zero_tol: f64) -> bool {
        match self {
            Witness::Branch { vanished, .. } => {
                vanished.iter().all(|f| f.vanishes_within(c, zero_tol))
            }
            _ => true,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Linear(LinearType::DegenerateDetZero) => f.write_str("det J = 0"),
            Witness::Linear(_) => f.write_str("trace J != 0 or det J < 0"),
            Witness::FirstFocalValue => f.write_str("L1 != 0"),
            Witness::Branch { branch, vanished } => {
                let n = branch.factors().len();
                match branch {
                    FocalBranch::CaseA_b3Zero => return f.write_str("case (a): b3=0"),
                    FocalBranch::NotApplicable => {
                        return f.write_str("L1=0, no L2 formula applies")
                    }
                    _ => {}
                }
                write!(f, "case ({branch}): ")?;
                if vanished.is_empty() {
                    let words = ["one", "two", "three", "four", "five", "six"];
                    write!(
                        f,
                        "none of {} factors vanish",
                        words.get(n - 1).copied().unwrap_or("the")
                    )
                } else {
                    let names: Vec<String> = vanished.iter().map(|x| format!("{x}=0")).collect();
                    f.write_str(&names.join(", "))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterClassification {
    pub verdict: Verdict,
    pub cases: BTreeSet<CenterCase>,
    pub witness: Witness,
    pub focal: Option<FocalValues>,
}

impl fmt::Display for CenterClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cases: Vec<String> = self.cases.iter().map(|c| c.to_string()).collect();
        write!(
            f,
            "verdict={} cases=[{}] witness={}",
            self.verdict,
            cases.join(","),
            self.witness
        )?;
        if let Some(fv) = &self.focal {
            write!(f, " L1={}", fv.l1)?;
            if let Some(l2) = fv.l2 {
                write!(f, " L2={l2}")?;
            }
        }
        Ok(())
    }
}

pub fn classify(c: &CanonicalParams) -> Result<CenterClassification> {
    classify_with(c, &Tolerances::default())
}

pub fn classify_with(c: &CanonicalParams, tols: &Tolerances) -> Result<CenterClassification> {
    c.validate()?;
    tols.validate()?;
    let lt = linear_type(c);
    let cases = match_table_cases_with(c, tols.case_rel);
    if lt != LinearType::EllipticCandidate {
        let verdict = match lt {
            LinearType::DegenerateDetZero => Verdict::DegenerateDetZero,
            _ => Verdict::NotElliptic,
        };
        return Ok(CenterClassification {
            verdict,
            cases: BTreeSet::new(),
            witness: Witness::Linear(lt),
            focal: None,
        });
    }
    let focal = closed_form_focal_with(c, tols)?;
    let witness = Witness::from_focal(c, &focal);
    let focus = |v: f64| {
        if v < 0.0 {
            Verdict::FocusStable
        } else {
            Verdict::FocusUnstable
        }
    };
    let verdict = if !focal.l1_vanishes() {
        focus(focal.l1)
    } else if focal.l2.is_none() {
        Verdict::WeakFocusOrder2Plus
    } else if !focal.l2_vanishes() {
        focus(focal.l2.unwrap_or(0.0))
    } else if !cases.is_empty() {
        Verdict::Center
    } else if CenterCase::ALL
        .iter()
        .any(|case| case.status_with(c, tols.case_rel).0)
    {
        Verdict::WeakFocusOrder2Plus
    } else {
        return Err(Error::InternalInconsistency(format!(
            "L1 = L2 = 0 at {} but no center case matches ({witness})",
            c.to_string().replace('\n', " ")
        )));
    };
    let cases = if verdict == Verdict::Center {
        cases
    } else {
        BTreeSet::new()
    };
    Ok(CenterClassification {
        verdict,
        cases,
        witness,
        focal: Some(focal),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use CenterCase::*;

    fn cp(a1: f64, b1: f64, a3: f64, b3: f64, k: f64) -> CanonicalParams {
        CanonicalParams::new(a1, b1, a3, b3, k).unwrap()
    }

    fn set(v: &[CenterCase]) -> BTreeSet<CenterCase> {
        v.iter().copied().collect()
    }

    #[test]
    fn linear_types() {
        assert_eq!(
            linear_type(&cp(1.0, 2.0, 1.0, 1.0, 1.0)),
            LinearType::EllipticCandidate
        );
        assert_eq!(
            linear_type(&cp(1.0, 1.0, 1.0, 1.0, 1.0)),
            LinearType::DegenerateDetZero
        );
        assert_eq!(
            linear_type(&cp(2.0, 1.0, 1.0, 1.0, 1.0)),
            LinearType::NotElliptic
        );
    }

    #[test]
    fn table_rows() {
        assert_eq!(match_table_cases(&cp(0.0, 1.0, 1.0, 0.0, 7.0)), set(&[I]));
        assert_eq!(
            match_table_cases(&cp(-0.5, -1.5, -1.5, -0.5, 1.0)),
            set(&[II, R1])
        );
        assert_eq!(match_table_cases(&cp(1.0, 2.0, 1.0, 1.0, 1.0)), set(&[]));
        assert_eq!(
            match_table_cases(&cp(1.0, -1.0, -3.0, 2.0, 0.5)),
            set(&[IV])
        );
        // rows (iii) and (iv) meet only where a1 + b1 = 0, i.e. det J = 0
        assert_eq!(match_table_cases(&cp(1.0, -1.0, -1.0, 1.0, 1.0)), set(&[]));
        // r1 ∩ r2: a1 = b3 = b1 + 2, a3 = b1, K = 1
        assert_eq!(
            match_table_cases(&cp(-1.0, -3.0, -3.0, -1.0, 1.0)),
            set(&[R1, R2])
        );
    }

    #[test]
    fn focus_from_second_value() {
        let r = classify(&cp(1.0, -2.0, -3.0, 1.0, 1.0)).unwrap();
        assert_eq!(r.verdict, Verdict::FocusStable);
        assert!(r.cases.is_empty());
        assert_eq!(
            r.witness.to_string(),
            "case (c2): none of four factors vanish"
        );
        let r = classify(&cp(1.0, 2.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(r.verdict, Verdict::FocusStable);
        assert!((r.focal.unwrap().l2.unwrap() + 0.0327).abs() < 1e-4);
    }

    #[test]
    fn centers_with_witness() {
        let r = classify(&cp(0.0, 1.0, 1.0, 0.0, 3.0)).unwrap();
        assert_eq!(r.verdict, Verdict::Center);
        assert_eq!(r.cases, set(&[I]));
        assert_eq!(r.witness.to_string(), "case (a): b3=0");

        let c = cp(1.0, -2.0, -1.0, 1.0, 1.0);
        let r = classify(&c).unwrap();
        assert_eq!(r.verdict, Verdict::Center);
        assert_eq!(r.cases, set(&[III]));
        assert_eq!(r.witness.to_string(), "case (c1): 1+a3=0");
        assert!(r.witness.is_consistent(&c));

        let r = classify(&cp(1.0, -1.0, -3.0, 1.0, 1.0)).unwrap();
        assert_eq!(r.cases, set(&[IV]));
        assert_eq!(r.witness.to_string(), "case (c2): 1+b1=0");

        assert_eq!(
            classify(&cp(1.0, -1.0, -1.0, 1.0, 1.0)).unwrap().verdict,
            Verdict::DegenerateDetZero
        );
    }

    #[test]
    fn first_value_decides() {
        let r = classify(&cp(0.98, 2.0, 1.0, 1.0, 0.98)).unwrap();
        assert_eq!(r.verdict, Verdict::FocusUnstable);
        assert_eq!(r.witness, Witness::FirstFocalValue);
        let r = classify(&cp(1.02, 2.0, 1.0, 1.0, 1.02)).unwrap();
        assert_eq!(r.verdict, Verdict::FocusStable);
    }

    #[test]
    fn off_slice_short_circuits() {
        let r = classify(&cp(2.0, 1.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(r.verdict, Verdict::NotElliptic);
        assert!(r.focal.is_none());
        assert_eq!(
            classify(&cp(1.0, 1.0, 1.0, 1.0, 1.0)).unwrap().verdict,
            Verdict::DegenerateDetZero
        );
    }

    #[test]
    fn record_lists_sorted_cases() {
        let r = classify(&cp(-0.5, -1.5, -1.5, -0.5, 1.0)).unwrap();
        assert!(
            r.to_string().starts_with("verdict=Center cases=[II,R1] "),
            "{r}"
        );
    }
}
