//! Taylor expansion of the canonical field around the equilibrium.
//!
//! In shifted coordinates `u = x - 1`, `v = y - 1` each power-law monomial
//! expands as `(1+u)^a (1+v)^b = Σ C(a,i) C(b,j) u^i v^j` with generalized
//! binomial coefficients `C(a,k) = a(a-1)...(a-k+1)/k!`.

use crate::error::{Error, Result};
use crate::model::CanonicalParams;

/// Generalized binomial coefficients `C(a, 0..=n)`.
pub fn binomials(a: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut c = 1.0;
    out.push(c);
    for k in 1..=n {
        c *= (a - (k - 1) as f64) / k as f64;
        out.push(c);
    }
    out
}

/// Truncated series of both field components in `(u, v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorField {
    degree: usize,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl TaylorField {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.degree + 1) + j
    }

    /// Builds a field from coefficient functions; constant terms are forced to zero.
    pub fn from_fn(
        degree: usize,
        x: impl Fn(usize, usize) -> f64,
        y: impl Fn(usize, usize) -> f64,
    ) -> Self {
        let mut tf = TaylorField {
            degree,
            x: vec![0.0; (degree + 1) * (degree + 1)],
            y: vec![0.0; (degree + 1) * (degree + 1)],
        };
        for i in 0..=degree {
            for j in 0..=degree - i {
                if i + j > 0 {
                    let at = tf.idx(i, j);
                    tf.x[at] = x(i, j);
                    tf.y[at] = y(i, j);
                }
            }
        }
        tf
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `u^i v^j` in the x-component (0 beyond the degree).
    pub fn x_coef(&self, i: usize, j: usize) -> f64 {
        if i + j > self.degree {
            0.0
        } else {
            self.x[self.idx(i, j)]
        }
    }

    pub fn y_coef(&self, i: usize, j: usize) -> f64 {
        if i + j > self.degree {
            0.0
        } else {
            self.y[self.idx(i, j)]
        }
    }

    /// Linear part `[[∂u f, ∂v f], [∂u g, ∂v g]]`.
    pub fn linear_part(&self) -> [[f64; 2]; 2] {
        [
            [self.x_coef(1, 0), self.x_coef(0, 1)],
            [self.y_coef(1, 0), self.y_coef(0, 1)],
        ]
    }

    /// Evaluates the truncated series at `(u, v)`.
    pub fn eval(&self, u: f64, v: f64) -> (f64, f64) {
        let (mut fx, mut fy) = (0.0, 0.0);
        let mut ui = 1.0;
        for i in 0..=self.degree {
            let mut vj = 1.0;
            for j in 0..=self.degree - i {
                fx += self.x_coef(i, j) * ui * vj;
                fy += self.y_coef(i, j) * ui * vj;
                vj *= v;
            }
            ui *= u;
        }
        (fx, fy)
    }
}

pub fn taylor_expand(c: &CanonicalParams, degree: usize) -> Result<TaylorField> {
    if degree < 2 {
        return Err(Error::InsufficientDegree {
            have: degree,
            need: 2,
        });
    }
    let n = degree;
    let (ca1, cb1) = (binomials(c.a1, n), binomials(c.b1, n));
    let (ca3, cb3) = (binomials(c.a3, n), binomials(c.b3, n));
    let mut tf = TaylorField {
        degree: n,
        x: vec![0.0; (n + 1) * (n + 1)],
        y: vec![0.0; (n + 1) * (n + 1)],
    };
    for i in 0..=n {
        for j in 0..=n - i {
            if i + j == 0 {
                continue;
            }
            let at = tf.idx(i, j);
            tf.x[at] = ca1[i] * cb1[j];
            tf.y[at] = -c.k * ca3[i] * cb3[j];
        }
    }
    Ok(tf)
}
