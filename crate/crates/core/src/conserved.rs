//! First integrals and integrating factors of the known center cases.
//!
//! A term `x^α / α` with `α = 0` is replaced by `ln x` (and likewise in `y`).

use std::fmt;
use std::str::FromStr;

use crate::classifier::CenterCase;
use crate::error::{Error, Result};
use crate::model::{CanonicalParams, Point};
use crate::tol::{approx_eq, CASE_REL_TOL};

/// Which closed-form integral to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegralCase {
    Table(CenterCase),
    /// `a1 = b3 = b1 + 2`, `a3 = b1`, `K = 1`, `b1 < -1`.
    R1capR2,
}

impl fmt::Display for IntegralCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegralCase::Table(c) => write!(f, "{}", c.to_string().to_lowercase()),
            IntegralCase::R1capR2 => f.write_str("r1r2"),
        }
    }
}

impl FromStr for IntegralCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "i" => IntegralCase::Table(CenterCase::I),
            "ii" => IntegralCase::Table(CenterCase::II),
            "iii" => IntegralCase::Table(CenterCase::III),
            "iv" => IntegralCase::Table(CenterCase::IV),
            "r1" => IntegralCase::Table(CenterCase::R1),
            "r2" => IntegralCase::Table(CenterCase::R2),
            "r1r2" | "r1capr2" => IntegralCase::R1capR2,
            _ => return Err(Error::Parse(format!("unknown case {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermKind {
    PowerX(f64),
    PowerY(f64),
    LogX,
    LogY,
    MixedPower(f64, f64),
    /// `(1/x + 1/y)^e`
    SumPower(f64),
    /// `(1/x + 1/y)^e (xy)^p`
    SumProductPower(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub kind: TermKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegratingFactor {
    /// `x^A y^B`
    Monomial { a: f64, b: f64 },
    /// `(x + y)^e`
    SumPower(f64),
}

impl IntegratingFactor {
    pub fn eval(&self, pt: Point) -> f64 {
        match *self {
            IntegratingFactor::Monomial { a, b } => crate::model::monomial(pt.x, pt.y, a, b),
            IntegratingFactor::SumPower(e) => (pt.x + pt.y).powf(e),
        }
    }
}

impl fmt::Display for IntegratingFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            IntegratingFactor::Monomial { a, b } if a == 0.0 && b == 0.0 => f.write_str("1"),
            IntegratingFactor::Monomial { a, b } if b == 0.0 => write!(f, "x^{a}"),
            IntegratingFactor::Monomial { a, b } if a == 0.0 => write!(f, "y^{b}"),
            IntegratingFactor::Monomial { a, b } => write!(f, "x^{a} y^{b}"),
            IntegratingFactor::SumPower(e) => write!(f, "(x+y)^{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegral {
    pub case: IntegralCase,
    pub terms: Vec<Term>,
    pub integrating_factor: IntegratingFactor,
}

/// `coef * x^α / α`, or `coef * ln x` when `α = 0`.
fn power_over_exponent(coef: f64, alpha: f64, in_x: bool) -> Term {
    let kind = match (alpha.abs() <= CASE_REL_TOL, in_x) {
        (true, true) => TermKind::LogX,
        (true, false) => TermKind::LogY,
        (false, true) => TermKind::PowerX(alpha),
        (false, false) => TermKind::PowerY(alpha),
    };
    let coef = if alpha.abs() <= CASE_REL_TOL {
        coef
    } else {
        coef / alpha
    };
    Term { coef, kind }
}

fn in_intersection(c: &CanonicalParams) -> bool {
    let CanonicalParams { a1, b1, a3, b3, k } = *c;
    let eq = |a: f64, b: f64| approx_eq(a, b, CASE_REL_TOL);
    eq(a1, b3) && eq(b3, b1 + 2.0) && eq(a3, b1) && eq(k, 1.0) && b1 < -1.0
}

pub fn build_integral(case: IntegralCase, c: &CanonicalParams) -> Result<FirstIntegral> {
    c.validate()?;
    let CanonicalParams { a1, b1, a3, b3, k } = *c;
    let one = IntegratingFactor::Monomial { a: 0.0, b: 0.0 };
    let mismatch = || Error::CaseMismatch(format!("({case})"));
    let (terms, h) = match case {
        IntegralCase::Table(cc @ (CenterCase::R1 | CenterCase::R2)) => {
            if !cc.matches(c) {
                return Err(mismatch());
            }
            if !in_intersection(c) {
                return Err(Error::NoKnownIntegral(format!(
                    "no closed-form integral for case ({case}) here"
                )));
            }
            return build_integral(IntegralCase::R1capR2, c).map(|fi| FirstIntegral { case, ..fi });
        }
        IntegralCase::Table(cc) if !cc.matches(c) => return Err(mismatch()),
        IntegralCase::R1capR2 if !in_intersection(c) => return Err(mismatch()),
        IntegralCase::Table(CenterCase::I) => (
            vec![
                Term {
                    coef: 1.0,
                    kind: TermKind::PowerX(1.0),
                },
                power_over_exponent(-1.0, a3 + 1.0, true),
                Term {
                    coef: 1.0 / k,
                    kind: TermKind::PowerY(1.0),
                },
                power_over_exponent(-1.0 / k, b1 + 1.0, false),
            ],
            one,
        ),
        IntegralCase::Table(CenterCase::II) => (
            vec![
                Term {
                    coef: a1,
                    kind: TermKind::PowerX(1.0),
                },
                Term {
                    coef: b3,
                    kind: TermKind::PowerY(1.0),
                },
                Term {
                    coef: -1.0,
                    kind: TermKind::MixedPower(a1, b3),
                },
            ],
            one,
        ),
        IntegralCase::Table(CenterCase::III) => (
            vec![
                // -a1/(a1-1) x^(1-a1) = a1 x^α / α with α = 1 - a1
                power_over_exponent(a1, 1.0 - a1, true),
                power_over_exponent(-1.0, b1 + 1.0, false),
                Term {
                    coef: 1.0,
                    kind: TermKind::MixedPower(-a1, 1.0),
                },
            ],
            IntegratingFactor::Monomial { a: -a1, b: 0.0 },
        ),
        IntegralCase::Table(CenterCase::IV) => (
            vec![
                power_over_exponent(-1.0, a3 + 1.0, true),
                // -b3/(b3-1) y^(1-b3) = b3 y^α / α with α = 1 - b3
                power_over_exponent(b3, 1.0 - b3, false),
                Term {
                    coef: 1.0,
                    kind: TermKind::MixedPower(1.0, -b3),
                },
            ],
            IntegratingFactor::Monomial { a: 0.0, b: -b3 },
        ),
        IntegralCase::R1capR2 => {
            let e = -(b1 + 1.0);
            (
                vec![
                    Term {
                        coef: 1.0,
                        kind: TermKind::SumPower(e),
                    },
                    Term {
                        coef: 1.0,
                        kind: TermKind::SumProductPower(e, e),
                    },
                ],
                IntegratingFactor::SumPower(-(b1 + 2.0)),
            )
        }
    };
    Ok(FirstIntegral {
        case,
        terms,
        integrating_factor: h,
    })
}

fn check_domain(pt: Point) -> Result<()> {
    if pt.x > 0.0 && pt.y > 0.0 && pt.x.is_finite() && pt.y.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { x: pt.x, y: pt.y })
    }
}

impl Term {
    fn value(&self, x: f64, y: f64) -> f64 {
        let v = match self.kind {
            TermKind::PowerX(e) => x.powf(e),
            TermKind::PowerY(e) => y.powf(e),
            TermKind::LogX => x.ln(),
            TermKind::LogY => y.ln(),
            TermKind::MixedPower(p, q) => (p * x.ln() + q * y.ln()).exp(),
            TermKind::SumPower(e) => (1.0 / x + 1.0 / y).powf(e),
            TermKind::SumProductPower(e, p) => {
                (e * (1.0 / x + 1.0 / y).ln() + p * (x * y).ln()).exp()
            }
        };
        self.coef * v
    }

    /// `value(x, y) - value(1, 1)` without cancellation.
    fn shifted_value(&self, x: f64, y: f64) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        let v = match self.kind {
            TermKind::PowerX(e) => (e * x.ln()).exp_m1(),
            TermKind::PowerY(e) => (e * y.ln()).exp_m1(),
            TermKind::LogX => x.ln(),
            TermKind::LogY => y.ln(),
            TermKind::MixedPower(p, q) => (p * x.ln() + q * y.ln()).exp_m1(),
            TermKind::SumPower(e) => {
                (e * ln2).exp() * (e * ((1.0 / x + 1.0 / y).ln() - ln2)).exp_m1()
            }
            TermKind::SumProductPower(e, p) => {
                (e * ln2).exp() * (e * ((1.0 / x + 1.0 / y).ln() - ln2) + p * (x * y).ln()).exp_m1()
            }
        };
        self.coef * v
    }

    fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        let c = self.coef;
        match self.kind {
            TermKind::PowerX(e) => (c * e * x.powf(e - 1.0), 0.0),
            TermKind::PowerY(e) => (0.0, c * e * y.powf(e - 1.0)),
            TermKind::LogX => (c / x, 0.0),
            TermKind::LogY => (0.0, c / y),
            TermKind::MixedPower(p, q) => {
                let m = c * (p * x.ln() + q * y.ln()).exp();
                (m * p / x, m * q / y)
            }
            TermKind::SumPower(e) => {
                let s = 1.0 / x + 1.0 / y;
                let d = c * e * s.powf(e - 1.0);
                (-d / (x * x), -d / (y * y))
            }
            TermKind::SumProductPower(e, p) => {
                let s = 1.0 / x + 1.0 / y;
                let m = c * (e * s.ln() + p * (x * y).ln()).exp();
                (m * (p / x - e / (s * x * x)), m * (p / y - e / (s * y * y)))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coef;
        match self.kind {
            TermKind::PowerX(e) if e == 1.0 => write!(f, "{c}*x"),
            TermKind::PowerX(e) => write!(f, "{c}*x^{e}"),
            TermKind::PowerY(e) if e == 1.0 => write!(f, "{c}*y"),
            TermKind::PowerY(e) => write!(f, "{c}*y^{e}"),
            TermKind::LogX => write!(f, "{c}*ln(x)"),
            TermKind::LogY => write!(f, "{c}*ln(y)"),
            TermKind::MixedPower(p, q) => write!(f, "{c}*x^{p}*y^{q}"),
            TermKind::SumPower(e) => write!(f, "{c}*(1/x+1/y)^{e}"),
            TermKind::SumProductPower(e, p) => write!(f, "{c}*(1/x+1/y)^{e}*(x*y)^{p}"),
        }
    }
}

impl fmt::Display for FirstIntegral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(
            f,
            "V = {}; h = {}",
            terms.join(" + "),
            self.integrating_factor
        )
    }
}

impl FirstIntegral {
    /// `V(pt)` as written in the table.
    pub fn evaluate(&self, pt: Point) -> Result<f64> {
        check_domain(pt)?;
        Ok(self.terms.iter().map(|t| t.value(pt.x, pt.y)).sum())
    }

    /// `V(pt) - V(1, 1)`, computed term-wise without cancellation.
    pub fn evaluate_normalized(&self, pt: Point) -> Result<f64> {
        check_domain(pt)?;
        Ok(self.terms.iter().map(|t| t.shifted_value(pt.x, pt.y)).sum())
    }

    /// Sum of the absolute term values at `pt`; the rounding scale of `V`.
    pub fn magnitude(&self, pt: Point) -> Result<f64> {
        check_domain(pt)?;
        Ok(self.terms.iter().map(|t| t.value(pt.x, pt.y).abs()).sum())
    }

    pub fn gradient(&self, pt: Point) -> Result<(f64, f64)> {
        check_domain(pt)?;
        Ok(self.terms.iter().fold((0.0, 0.0), |(gx, gy), t| {
            let (dx, dy) = t.gradient(pt.x, pt.y);
            (gx + dx, gy + dy)
        }))
    }

    /// `∇V · F` at `pt` relative to `max(1, Σ |term-wise products|)`.
    pub fn scaled_residual(&self, c: &CanonicalParams, pt: Point) -> Result<f64> {
        check_domain(pt)?;
        let m1 = crate::model::monomial(pt.x, pt.y, c.a1, c.b1);
        let m3 = crate::model::monomial(pt.x, pt.y, c.a3, c.b3);
        let (fx, fy) = (m1 - 1.0, c.k * (1.0 - m3));
        let (mut gx, mut gy, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        for t in &self.terms {
            let (dx, dy) = t.gradient(pt.x, pt.y);
            gx += dx;
            gy += dy;
            sx += dx.abs();
            sy += dy.abs();
        }
        let scale = sx * (m1.abs() + 1.0) + sy * c.k * (1.0 + m3.abs());
        Ok((gx * fx + gy * fy).abs() / scale.max(1.0))
    }
}

pub fn evaluate(fi: &FirstIntegral, pt: Point) -> Result<f64> {
    fi.evaluate(pt)
}

pub fn gradient(fi: &FirstIntegral, pt: Point) -> Result<(f64, f64)> {
    fi.gradient(pt)
}

/// Largest scaled `|∇V · F|` over `pts`. Points outside the quadrant are skipped.
pub fn invariance_residual(fi: &FirstIntegral, c: &CanonicalParams, pts: &[Point]) -> f64 {
    pts.iter()
        .filter_map(|&p| fi.scaled_residual(c, p).ok())
        .fold(0.0, f64::max)
}

/// Largest `|V(p) - V(p0)|` along `pts`, relative to the term magnitude of `V` at `p0`.
pub fn relative_drift(fi: &FirstIntegral, pts: &[Point]) -> Result<f64> {
    let Some(&p0) = pts.first() else {
        return Ok(0.0);
    };
    let v0 = fi.evaluate_normalized(p0)?;
    let scale = fi.magnitude(p0)?.max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for &p in pts {
        worst = worst.max((fi.evaluate_normalized(p)? - v0).abs());
    }
    Ok(worst / scale)
}
