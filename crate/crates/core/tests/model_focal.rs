mod common;

use common::*;
use lotka_center::focal::{closed_form_focal, d_value, lyapunov_numeric, taylor_expand};
use lotka_center::model::{canonicalize, EigenvalueKind};
use lotka_center::{CanonicalParams, RawLotkaParams};
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn params() -> impl Strategy<Value = CanonicalParams> {
    (
        exponent(),
        exponent(),
        exponent(),
        exponent(),
        0.05..10.0f64,
    )
        .prop_map(|(a1, b1, a3, b3, k)| CanonicalParams::new(a1, b1, a3, b3, k).unwrap())
}

/// Central difference stencil for the k-th derivative along one axis.
fn stencil(k: usize, h: f64) -> Vec<(f64, f64)> {
    let mut binom = 1.0;
    (0..=k)
        .map(|m| {
            let w = if m % 2 == 0 { binom } else { -binom };
            binom *= (k - m) as f64 / (m + 1) as f64;
            ((k as f64 / 2.0 - m as f64) * h, w / h.powi(k as i32))
        })
        .collect()
}

/// `∂^(i+j) f / ∂x^i ∂y^j / (i! j!)` at (1, 1), Richardson-extrapolated.
fn fd_coefficient(f: impl Fn(f64, f64) -> f64, i: usize, j: usize) -> f64 {
    let at = |h: f64| {
        let mut s = 0.0;
        for (dx, wx) in stencil(i, h) {
            for (dy, wy) in stencil(j, h) {
                s += wx * wy * f(1.0 + dx, 1.0 + dy);
            }
        }
        s
    };
    let h = 0.02;
    let d = (4.0 * at(h / 2.0) - at(h)) / 3.0;
    let fact = |n: usize| (1..=n).product::<usize>() as f64;
    d / (fact(i) * fact(j))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn equilibrium_is_a_zero(c in params()) {
        prop_assert_eq!(c.field(1.0, 1.0), (0.0, 0.0));
    }

    #[test]
    fn jacobian_matches_finite_differences(c in params()) {
        let j = c.jacobian().matrix;
        let h = 1e-6;
        let fx = |x: f64, y: f64| c.field(x, y);
        let (px, mx) = (fx(1.0 + h, 1.0), fx(1.0 - h, 1.0));
        let (py, my) = (fx(1.0, 1.0 + h), fx(1.0, 1.0 - h));
        let fd = [
            [(px.0 - mx.0) / (2.0 * h), (py.0 - my.0) / (2.0 * h)],
            [(px.1 - mx.1) / (2.0 * h), (py.1 - my.1) / (2.0 * h)],
        ];
        for r in 0..2 {
            for s in 0..2 {
                let scale = j[r][s].abs().max(1.0) * (1.0 + c.a1.abs() + c.b1.abs() + c.a3.abs() + c.b3.abs());
                prop_assert!((fd[r][s] - j[r][s]).abs() <= 1e-6 * scale, "{:?} vs {:?}", fd, j);
            }
        }
    }

    #[test]
    fn omega_and_eigenvalue_kind(c in params()) {
        let j = c.jacobian();
        if j.determinant > 0.0 {
            prop_assert!((j.omega * j.omega - j.determinant).abs() <= 1e-12 * j.determinant);
        }
        match j.eigenvalue_kind {
            EigenvalueKind::PurelyImaginary => prop_assert!(j.determinant > 0.0),
            EigenvalueKind::RealDistinct => prop_assert!(j.trace * j.trace > 4.0 * j.determinant),
            EigenvalueKind::ComplexWithRealPart => prop_assert!(j.trace != 0.0 && j.trace * j.trace < 4.0 * j.determinant),
            _ => {}
        }
    }

    #[test]
    fn dancso_round_trip_is_exact(a1 in -5i32..5, b1 in -5i32..5, a3 in -5i32..5, b3 in -5i32..5, k in 1u32..40) {
        // quarter-integers keep every sum exactly representable
        let c = CanonicalParams::new(a1 as f64 / 4.0, b1 as f64 / 4.0, a3 as f64 / 4.0, b3 as f64 / 4.0, k as f64 / 8.0).unwrap();
        prop_assert_eq!(c.to_dancso().to_canonical(), c);
        prop_assert!(c.to_dancso().c > 0.0);
    }

    #[test]
    fn text_record_round_trip(c in params()) {
        let back: CanonicalParams = c.to_string().parse().unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn canonicalized_equilibrium_zeroes_raw_field(
        k in prop::array::uniform4(0.1..10.0f64),
        e in prop::array::uniform6(-3.0..3.0f64),
    ) {
        let raw = RawLotkaParams {
            k1: k[0], k2: k[1], k3: k[2], k4: k[3],
            alpha1: e[0], beta1: e[1], alpha2: e[2], beta2: e[3], alpha3: e[4], beta3: e[5],
        };
        let (a1, b1, a3, b3) = raw.reduced_exponents();
        prop_assume!((a1 * b3 - b1 * a3).abs() > 0.05);
        let (c, eq) = canonicalize(&raw).unwrap();
        prop_assert!(raw.relative_residual(eq) <= 1e-12);
        prop_assert_eq!(c.field(1.0, 1.0), (0.0, 0.0));
    }

    #[test]
    fn taylor_matches_finite_differences(
        a1 in -3.0..3.0f64, b1 in -3.0..3.0f64, a3 in -3.0..3.0f64, b3 in -3.0..3.0f64, k in 0.2..3.0f64,
    ) {
        let c = CanonicalParams::new(a1, b1, a3, b3, k).unwrap();
        let tf = taylor_expand(&c, 4).unwrap();
        for i in 0..=4 {
            for j in 0..=4 - i {
                if i + j == 0 {
                    continue;
                }
                let fx = fd_coefficient(|x, y| c.field(x, y).0, i, j);
                let fy = fd_coefficient(|x, y| c.field(x, y).1, i, j);
                let (tx, ty) = (tf.x_coef(i, j), tf.y_coef(i, j));
                prop_assert!((fx - tx).abs() <= 1e-5 * tx.abs().max(1.0), "x ({}, {}): {} vs {}", i, j, fx, tx);
                prop_assert!((fy - ty).abs() <= 1e-5 * ty.abs().max(1.0), "y ({}, {}): {} vs {}", i, j, fy, ty);
            }
        }
    }

    #[test]
    fn taylor_has_no_constant_and_jacobian_linear_part(c in params(), degree in 2usize..8) {
        let tf = taylor_expand(&c, degree).unwrap();
        prop_assert_eq!(tf.eval(0.0, 0.0), (0.0, 0.0));
        let j = c.jacobian().matrix;
        let l = tf.linear_part();
        for r in 0..2 {
            for s in 0..2 {
                prop_assert!((l[r][s] - j[r][s]).abs() <= 1e-12 * j[r][s].abs().max(1.0));
            }
        }
    }

    #[test]
    fn lyapunov_list_has_requested_length(seed in any::<u64>(), order in 1usize..4) {
        let c = elliptic(&mut rng(seed), EXP_MAX);
        let tf = taylor_expand(&c, 2 * order + 1).unwrap();
        let l = lyapunov_numeric(&tf, order).unwrap();
        prop_assert_eq!(l.ell.len(), order);
    }

    #[test]
    fn l2_only_when_l1_vanishes(seed in any::<u64>()) {
        let mut r = rng(seed);
        for c in [elliptic(&mut r, EXP_MAX), l1_zero_case_b(&mut r, EXP_MAX), l1_zero_case_c2(&mut r, EXP_MAX)] {
            let f = closed_form_focal(&c).unwrap();
            if f.l2.is_some() {
                prop_assert!(f.l1_vanishes());
            }
        }
    }

    #[test]
    fn d_identity_on_b3_one(b1 in -5.0..5.0f64, a3 in -5.0..5.0f64, k in 0.05..5.0f64) {
        let c = CanonicalParams::new(k, b1, a3, 1.0, k).unwrap();
        let d = d_value(&c);
        prop_assert!((d - (1.0 + a3) * (1.0 - k)).abs() <= 1e-12 * (1.0 + a3.abs()) * (1.0 + k));
    }
}

#[test]
fn d_identity_zero_set() {
    // b3 = 1 with 1 + a3 = 0 or K = 1
    for c in [
        CanonicalParams::new(0.7, 2.0, -1.0, 1.0, 0.7).unwrap(),
        CanonicalParams::new(1.0, 2.0, 3.5, 1.0, 1.0).unwrap(),
    ] {
        assert_eq!(d_value(&c), 0.0);
    }
    assert_ne!(
        d_value(&CanonicalParams::new(0.7, 2.0, -0.5, 1.0, 0.7).unwrap()),
        0.0
    );
}
