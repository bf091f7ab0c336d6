//! Parameterizations of the Lotka power-law system and pointwise evaluation.
//!
//! Three forms are supported:
//!
//! - [`RawLotkaParams`]: rate constants and exponents of the chemical ODE
//!   `x' = k1 x^α1 y^β1 - k2 x^α2 y^β2`, `y' = k3 x^α2 y^β2 - k4 x^α3 y^β3`.
//! - [`CanonicalParams`]: the scaled form `x' = x^a1 y^b1 - 1`,
//!   `y' = K (1 - x^a3 y^b3)` with equilibrium `(1, 1)`.
//! - [`DancsoParams`]: the orbitally equivalent form
//!   `x' = x^p̂ - x^p y^q`, `y' = C (x^p y^q - y^q̂)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tol;

/// `x^a y^b` on the positive quadrant, computed as `exp(a ln x + b ln y)`.
///
/// Returns NaN for nonpositive arguments.
#[inline]
pub fn monomial(x: f64, y: f64, a: f64, b: f64) -> f64 {
    let mut s = 0.0;
    if a != 0.0 {
        s += a * x.ln();
    }
    if b != 0.0 {
        s += b * y.ln();
    }
    if x <= 0.0 || y <= 0.0 {
        return f64::NAN;
    }
    s.exp()
}

/// A state in the open positive quadrant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(Error::Domain { x, y })
        }
    }

    pub const EQUILIBRIUM: Point = Point { x: 1.0, y: 1.0 };
}

/// Rate constants and exponents of the chemical ODE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawLotkaParams {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
    pub alpha3: f64,
    pub beta3: f64,
}

impl RawLotkaParams {
    pub fn validate(&self) -> Result<()> {
        for (name, k) in [
            ("k1", self.k1),
            ("k2", self.k2),
            ("k3", self.k3),
            ("k4", self.k4),
        ] {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {k}"
                )));
            }
        }
        let exps = [
            self.alpha1,
            self.beta1,
            self.alpha2,
            self.beta2,
            self.alpha3,
            self.beta3,
        ];
        if exps.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter("exponents must be finite".into()));
        }
        Ok(())
    }

    /// Exponent differences `(a1, b1, a3, b3)` relative to the middle reaction.
    pub fn reduced_exponents(&self) -> (f64, f64, f64, f64) {
        (
            self.alpha1 - self.alpha2,
            self.beta1 - self.beta2,
            self.alpha3 - self.alpha2,
            self.beta3 - self.beta2,
        )
    }

    /// Right-hand side of the chemical ODE.
    pub fn vector_field(&self, pt: Point) -> (f64, f64) {
        let (x, y) = (pt.x, pt.y);
        let r1 = self.k1 * monomial(x, y, self.alpha1, self.beta1);
        let r2 = monomial(x, y, self.alpha2, self.beta2);
        let r3 = self.k4 * monomial(x, y, self.alpha3, self.beta3);
        (r1 - self.k2 * r2, self.k3 * r2 - r3)
    }

    /// Residual of the raw ODE at `pt`, relative to the size of the competing terms.
    pub fn relative_residual(&self, pt: Point) -> f64 {
        let (x, y) = (pt.x, pt.y);
        let r1 = self.k1 * monomial(x, y, self.alpha1, self.beta1);
        let r2 = monomial(x, y, self.alpha2, self.beta2);
        let r3 = self.k4 * monomial(x, y, self.alpha3, self.beta3);
        let ex = (r1 - self.k2 * r2).abs() / (r1.abs() + (self.k2 * r2).abs());
        let ey = (self.k3 * r2 - r3).abs() / ((self.k3 * r2).abs() + r3.abs());
        ex.max(ey)
    }
}

/// Parameters of the scaled ODE with equilibrium `(1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalParams {
    pub a1: f64,
    pub b1: f64,
    pub a3: f64,
    pub b3: f64,
    pub k: f64,
}

impl CanonicalParams {
    pub fn new(a1: f64, b1: f64, a3: f64, b3: f64, k: f64) -> Result<Self> {
        let c = CanonicalParams { a1, b1, a3, b3, k };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if [self.a1, self.b1, self.a3, self.b3]
            .iter()
            .any(|e| !e.is_finite())
        {
            return Err(Error::InvalidParameter("exponents must be finite".into()));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "K must be positive and finite, got {}",
                self.k
            )));
        }
        Ok(())
    }

    /// Vector field without the domain check; NaN off the open quadrant.
    #[inline]
    pub fn field(&self, x: f64, y: f64) -> (f64, f64) {
        (
            monomial(x, y, self.a1, self.b1) - 1.0,
            self.k * (1.0 - monomial(x, y, self.a3, self.b3)),
        )
    }

    pub fn vector_field(&self, pt: Point) -> Result<(f64, f64)> {
        let pt = Point::new(pt.x, pt.y)?;
        Ok(self.field(pt.x, pt.y))
    }

    pub fn trace(&self) -> f64 {
        self.a1 - self.k * self.b3
    }

    pub fn determinant(&self) -> f64 {
        self.k * (self.a3 * self.b1 - self.a1 * self.b3)
    }

    pub fn jacobian(&self) -> JacobianSummary {
        jacobian(*self)
    }

    pub fn to_dancso(&self) -> DancsoParams {
        to_dancso(*self)
    }
}

impl fmt::Display for CanonicalParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a1={}\nb1={}\na3={}\nb3={}\nK={}",
            self.a1, self.b1, self.a3, self.b3, self.k
        )
    }
}

impl FromStr for CanonicalParams {
    type Err = Error;

    /// Parses `key=value` pairs separated by newlines, commas or whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let mut vals: [Option<f64>; 5] = [None; 5];
        for item in s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
            let slot = match key {
                "a1" => 0,
                "b1" => 1,
                "a3" => 2,
                "b3" => 3,
                "K" => 4,
                other => return Err(Error::Parse(format!("unknown key `{other}`"))),
            };
            if vals[slot].is_some() {
                return Err(Error::Parse(format!("duplicate key `{key}`")));
            }
            let v: f64 = value
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{value}` for {key}")))?;
            vals[slot] = Some(v);
        }
        match vals {
            [Some(a1), Some(b1), Some(a3), Some(b3), Some(k)] => {
                CanonicalParams::new(a1, b1, a3, b3, k)
            }
            _ => Err(Error::Parse("record needs all of a1, b1, a3, b3, K".into())),
        }
    }
}

/// Parameters of the form `x' = x^p̂ - x^p y^q`, `y' = C (x^p y^q - y^q̂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DancsoParams {
    pub p_hat: f64,
    pub q_hat: f64,
    pub p: f64,
    pub q: f64,
    pub c: f64,
}

impl DancsoParams {
    pub fn to_canonical(&self) -> CanonicalParams {
        CanonicalParams {
            a1: self.p_hat - self.p,
            b1: -self.q,
            a3: -self.p,
            b3: self.q_hat - self.q,
            k: self.c,
        }
    }
}

pub fn to_dancso(c: CanonicalParams) -> DancsoParams {
    DancsoParams {
        p_hat: c.a1 - c.a3,
        q_hat: c.b3 - c.b1,
        p: -c.a3,
        q: -c.b1,
        c: c.k,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenvalueKind {
    PurelyImaginary,
    RealDistinct,
    RealRepeated,
    ComplexWithRealPart,
    ZeroEigenvalue,
}

/// Linearization at `(1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianSummary {
    /// Row-major `[[a1, b1], [-K a3, -K b3]]`.
    pub matrix: [[f64; 2]; 2],
    pub trace: f64,
    pub determinant: f64,
    pub omega: f64,
    pub eigenvalue_kind: EigenvalueKind,
}

impl JacobianSummary {
    pub fn is_elliptic(&self) -> bool {
        self.eigenvalue_kind == EigenvalueKind::PurelyImaginary
    }
}

/// Scale-relative zero test for the determinant.
pub fn determinant_is_zero(c: &CanonicalParams) -> bool {
    let scale = 1.0 + c.k * ((c.a3 * c.b1).abs() + (c.a1 * c.b3).abs());
    c.determinant().abs() <= 1e-12 * scale
}

pub fn jacobian(c: CanonicalParams) -> JacobianSummary {
    let trace = c.trace();
    let determinant = c.determinant();
    let trace_zero = tol::trace_is_zero(c.a1, c.b3, c.k);
    let disc = trace * trace - 4.0 * determinant;
    let disc_scale = trace * trace + 4.0 * determinant.abs();
    let eigenvalue_kind = if determinant_is_zero(&c) {
        EigenvalueKind::ZeroEigenvalue
    } else if trace_zero && determinant > 0.0 {
        EigenvalueKind::PurelyImaginary
    } else if disc.abs() <= 1e-12 * disc_scale {
        EigenvalueKind::RealRepeated
    } else if disc > 0.0 {
        EigenvalueKind::RealDistinct
    } else {
        EigenvalueKind::ComplexWithRealPart
    };
    JacobianSummary {
        matrix: [[c.a1, c.b1], [-c.k * c.a3, -c.k * c.b3]],
        trace,
        determinant,
        omega: if determinant > 0.0 {
            determinant.sqrt()
        } else {
            0.0
        },
        eigenvalue_kind,
    }
}

/// Scales the raw ODE by its positive equilibrium.
///
/// The equilibrium conditions `k1 x^a1 y^b1 = k2`, `k4 x^a3 y^b3 = k3` are
/// linear in `(ln x, ln y)` and are solved directly.
pub fn canonicalize(raw: &RawLotkaParams) -> Result<(CanonicalParams, Point)> {
    raw.validate()?;
    let (a1, b1, a3, b3) = raw.reduced_exponents();
    let r1 = (raw.k2 / raw.k1).ln();
    let r2 = (raw.k3 / raw.k4).ln();
    let det = a1 * b3 - b1 * a3;
    let scale = (a1 * b3).abs() + (b1 * a3).abs();
    if det.abs() <= 1e-12 * scale || scale == 0.0 {
        // Rank-deficient: consistent iff the augmented matrix has the same rank.
        let row_max = [a1, b1, a3, b3].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let consistent = if row_max == 0.0 {
            r1.abs() <= 1e-12 && r2.abs() <= 1e-12
        } else {
            let minor_a = a1 * r2 - a3 * r1;
            let minor_b = b1 * r2 - b3 * r1;
            let s = row_max * (1.0 + r1.abs() + r2.abs());
            minor_a.abs() <= 1e-12 * s && minor_b.abs() <= 1e-12 * s
        };
        return Err(if consistent {
            Error::NonIsolatedEquilibrium
        } else {
            Error::NoPositiveEquilibrium
        });
    }
    let lx = (r1 * b3 - b1 * r2) / det;
    let ly = (a1 * r2 - a3 * r1) / det;
    let (x, y) = (lx.exp(), ly.exp());
    let eq = Point::new(x, y).map_err(|_| Error::NoPositiveEquilibrium)?;
    let k = raw.k3 / raw.k2 * (x / y);
    let c = CanonicalParams::new(a1, b1, a3, b3, k)?;
    Ok((c, eq))
}
