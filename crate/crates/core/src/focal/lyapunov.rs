//! Numerical Lyapunov quantities from a truncated Taylor field.
//!
//! The linear part is brought to the rotation `X' = -ωY, Y' = ωX` by the
//! change `X = u`, `Y = -(a u + b v)/ω`, time is rescaled by `ω`, and the
//! field is written as `z' = i z + F(z, z̄)` with `z = X + iY`. A formal
//! Lyapunov function `V = z z̄ + Σ v_jk z^j z̄^k` is then solved degree by
//! degree so that `V' = Σ η_m (z z̄)^m`. The resonant coefficients
//! `η_2, η_3, ...` are the Lyapunov quantities `ℓ1, ℓ2, ...`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::focal::taylor::TaylorField;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Absolute threshold below which a Lyapunov quantity counts as zero.
pub const LYAPUNOV_ZERO_TOL: f64 = 1e-8;

/// Dense polynomial in two variables truncated at total degree `deg`.
#[derive(Debug, Clone)]
struct Poly {
    deg: usize,
    c: Vec<Complex64>,
}

impl Poly {
    fn zero(deg: usize) -> Self {
        Poly {
            deg,
            c: vec![Complex64::new(0.0, 0.0); (deg + 1) * (deg + 1)],
        }
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        if i + j > self.deg {
            Complex64::new(0.0, 0.0)
        } else {
            self.c[i * (self.deg + 1) + j]
        }
    }

    fn add_at(&mut self, i: usize, j: usize, v: Complex64) {
        if i + j <= self.deg {
            self.c[i * (self.deg + 1) + j] += v;
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.deg);
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                let a = self.at(i, j);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for p in 0..=self.deg - i - j {
                    for q in 0..=self.deg - i - j - p {
                        out.add_at(i + p, j + q, a * other.at(p, q));
                    }
                }
            }
        }
        out
    }

    /// `P(α1 s + β1 t, α2 s + β2 t)` as a polynomial in `(s, t)`.
    fn linear_substitute(
        &self,
        first: (Complex64, Complex64),
        second: (Complex64, Complex64),
    ) -> Poly {
        let n = self.deg;
        let mut lin1 = Poly::zero(n);
        lin1.add_at(1, 0, first.0);
        lin1.add_at(0, 1, first.1);
        let mut lin2 = Poly::zero(n);
        lin2.add_at(1, 0, second.0);
        lin2.add_at(0, 1, second.1);
        let powers = |lin: &Poly| {
            let mut out = Vec::with_capacity(n + 1);
            let mut one = Poly::zero(n);
            one.add_at(0, 0, Complex64::new(1.0, 0.0));
            out.push(one);
            for k in 1..=n {
                let next = out[k - 1].mul(lin);
                out.push(next);
            }
            out
        };
        let (p1, p2) = (powers(&lin1), powers(&lin2));
        let mut out = Poly::zero(n);
        for i in 0..=n {
            for j in 0..=n - i {
                let a = self.at(i, j);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let term = p1[i].mul(&p2[j]);
                for (slot, t) in out.c.iter_mut().zip(&term.c) {
                    *slot += a * t;
                }
            }
        }
        out
    }
}

/// Lyapunov quantities `ℓ1..ℓ_order` in units of `ω` (time rescaled to unit frequency).
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovQuantities {
    /// All computed resonant coefficients, `ell[k-1] = ℓk`.
    pub ell: Vec<f64>,
    pub omega: f64,
    /// Number of leading quantities that are coordinate invariant: `ℓk` is
    /// meaningful only when `ℓ1..ℓ(k-1)` vanish.
    pub determined: usize,
}

impl LyapunovQuantities {
    /// `ℓk` if it is determined.
    pub fn get(&self, k: usize) -> Option<f64> {
        (k >= 1 && k <= self.determined).then(|| self.ell[k - 1])
    }

    pub fn leading(&self) -> Option<(usize, f64)> {
        (1..=self.determined)
            .map(|k| (k, self.ell[k - 1]))
            .find(|(_, v)| v.abs() > LYAPUNOV_ZERO_TOL)
    }
}

pub fn lyapunov_numeric(tf: &TaylorField, order: usize) -> Result<LyapunovQuantities> {
    if order == 0 {
        return Err(Error::PreconditionViolated(
            "order must be at least 1".into(),
        ));
    }
    let need = 2 * order + 1;
    if tf.degree() < need {
        return Err(Error::InsufficientDegree {
            have: tf.degree(),
            need,
        });
    }
    let [[a, b], [c, d]] = tf.linear_part();
    let trace = a + d;
    let det = a * d - b * c;
    let scale = a.abs() + d.abs();
    if trace.abs() > 1e-12 * (1.0 + scale) {
        return Err(Error::PreconditionViolated(format!(
            "linear part has trace {trace}"
        )));
    }
    if !(det > 0.0) || b == 0.0 {
        return Err(Error::PreconditionViolated(format!(
            "linear part has determinant {det}"
        )));
    }
    let omega = det.sqrt();
    let n = need;

    // Nonlinear parts of both components in (u, v).
    let mut fu = Poly::zero(n);
    let mut fv = Poly::zero(n);
    for i in 0..=n {
        for j in 0..=n - i {
            if i + j >= 2 {
                fu.add_at(i, j, Complex64::new(tf.x_coef(i, j), 0.0));
                fv.add_at(i, j, Complex64::new(tf.y_coef(i, j), 0.0));
            }
        }
    }
    // P = fu, Q = -(a fu + b fv)/ω, then rescale time by ω.
    let mut p = Poly::zero(n);
    let mut q = Poly::zero(n);
    for k in 0..p.c.len() {
        p.c[k] = fu.c[k] / omega;
        q.c[k] = -(fu.c[k] * a + fv.c[k] * b) / (omega * omega);
    }
    // u = X, v = -(ω Y + a X)/b; then X = (z + z̄)/2, Y = (z - z̄)/(2i).
    let half = Complex64::new(0.5, 0.0);
    let (xz, xzb) = (half, half);
    let (yz, yzb) = (-I * half, I * half);
    let to_z = |poly: &Poly| {
        let in_xy = poly.linear_substitute(
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            (Complex64::new(-a / b, 0.0), Complex64::new(-omega / b, 0.0)),
        );
        in_xy.linear_substitute((xz, xzb), (yz, yzb))
    };
    let (pz, qz) = (to_z(&p), to_z(&q));
    let mut f = Poly::zero(n);
    let mut fbar = Poly::zero(n);
    for j in 0..=n {
        for k in 0..=n - j {
            f.add_at(j, k, pz.at(j, k) + I * qz.at(j, k));
        }
    }
    for j in 0..=n {
        for k in 0..=n - j {
            fbar.add_at(j, k, f.at(k, j).conj());
        }
    }

    // Lyapunov function coefficients, V_2 = z z̄.
    let vdeg = n + 1;
    let mut v = Poly::zero(vdeg);
    v.add_at(1, 1, Complex64::new(1.0, 0.0));
    let mut eta = Vec::with_capacity(order);
    for deg in 3..=vdeg {
        let mut rhs = vec![Complex64::new(0.0, 0.0); deg + 1];
        for m in 2..deg {
            let fd = deg - m + 1;
            if fd > n {
                continue;
            }
            for j in 0..=m {
                let kk = m - j;
                let vjk = v.at(j, kk);
                if vjk == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for pp in 0..=fd {
                    let qq = fd - pp;
                    if j > 0 {
                        // ∂z(z^j z̄^k) F → z^(j-1+pp) z̄^(k+qq)
                        let jj = j - 1 + pp;
                        rhs[jj] += vjk * j as f64 * f.at(pp, qq);
                    }
                    if kk > 0 {
                        let jj = j + pp;
                        rhs[jj] += vjk * kk as f64 * fbar.at(pp, qq);
                    }
                }
            }
        }
        for (j, r) in rhs.iter().enumerate() {
            let kk = deg - j;
            if j == kk {
                eta.push(r.re);
            } else {
                // i (j - k) v_jk + r = 0
                let coef = -*r / (I * (j as f64 - kk as f64));
                v.add_at(j, kk, coef);
            }
        }
    }
    let ell: Vec<f64> = eta.into_iter().take(order).collect();
    let mut determined = 1;
    while determined < ell.len() && ell[determined - 1].abs() <= LYAPUNOV_ZERO_TOL {
        determined += 1;
    }
    Ok(LyapunovQuantities {
        ell,
        omega,
        determined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::focal::taylor::taylor_expand;
    use crate::model::CanonicalParams;

    fn cp(a1: f64, b1: f64, a3: f64, b3: f64, k: f64) -> CanonicalParams {
        CanonicalParams::new(a1, b1, a3, b3, k).unwrap()
    }

    #[test]
    fn linear_center_has_zero_quantities() {
        let tf = taylor_expand(&cp(0.0, 1.0, 1.0, 0.0, 1.0), 5).unwrap();
        let lq = lyapunov_numeric(&tf, 2).unwrap();
        assert_eq!(lq.ell.len(), 2);
        assert_eq!(lq.omega, 1.0);
        assert!(lq.ell.iter().all(|v| v.abs() < 1e-15));
        assert_eq!(lq.determined, 2);
        assert!(lq.leading().is_none());
    }

    #[test]
    fn c2_base_is_weak_focus_of_order_two() {
        let tf = taylor_expand(&cp(1.0, 2.0, 1.0, 1.0, 1.0), 5).unwrap();
        let lq = lyapunov_numeric(&tf, 2).unwrap();
        assert!(lq.ell[0].abs() < 1e-12, "{:?}", lq);
        assert!(lq.get(2).unwrap() < 0.0);
        assert_eq!(lq.leading().unwrap().0, 2);
    }

    #[test]
    fn case_ii_sample_is_a_center() {
        let tf = taylor_expand(&cp(-0.5, -1.25, -1.5, -0.25, 2.0), 5).unwrap();
        let lq = lyapunov_numeric(&tf, 2).unwrap();
        assert!(
            lq.ell[0].abs() < 1e-12 && lq.ell[1].abs() < 1e-12,
            "{:?}",
            lq
        );
    }

    #[test]
    fn cubic_radial_term_matches_averaging() {
        // u' = -v + s u^3, v' = u: V = u^2 + v^2 gives V' = 2 s u^4, whose
        // average over the unit circle is (3/4) s r^4.
        let s = 0.3;
        let tf = TaylorField::from_fn(
            3,
            |i, j| match (i, j) {
                (0, 1) => -1.0,
                (3, 0) => s,
                _ => 0.0,
            },
            |i, j| if (i, j) == (1, 0) { 1.0 } else { 0.0 },
        );
        let lq = lyapunov_numeric(&tf, 1).unwrap();
        assert!((lq.ell[0] - 0.75 * s).abs() < 1e-14, "{:?}", lq);
    }

    #[test]
    fn rejects_bad_input() {
        let tf = taylor_expand(&cp(1.0, 2.0, 1.0, 1.0, 1.0), 3).unwrap();
        assert!(matches!(
            lyapunov_numeric(&tf, 2),
            Err(Error::InsufficientDegree { .. })
        ));
        let tf = taylor_expand(&cp(2.0, 2.0, 1.0, 1.0, 1.0), 5).unwrap();
        assert!(matches!(
            lyapunov_numeric(&tf, 2),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
