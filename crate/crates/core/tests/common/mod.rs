//! Seeded samplers for parameter sets on the trace-free slice.
#![allow(dead_code)]

use lotka_center::{CanonicalParams, CenterCase};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EXP_MAX: f64 = 5.0;
pub const K_RANGE: (f64, f64) = (0.05, 5.0);

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn exps_ok(c: &CanonicalParams, max: f64) -> bool {
    [c.a1, c.b1, c.a3, c.b3].iter().all(|e| e.abs() <= max)
}

fn accept(c: CanonicalParams, max: f64) -> Option<CanonicalParams> {
    let k_ok = c.k >= K_RANGE.0 && c.k <= K_RANGE.1;
    (exps_ok(&c, max) && k_ok && c.determinant() > 1e-6).then_some(c)
}

fn retry(
    rng: &mut ChaCha8Rng,
    mut f: impl FnMut(&mut ChaCha8Rng) -> Option<CanonicalParams>,
) -> CanonicalParams {
    loop {
        if let Some(c) = f(rng) {
            return c;
        }
    }
}

fn params(a1: f64, b1: f64, a3: f64, b3: f64, k: f64) -> Option<CanonicalParams> {
    CanonicalParams::new(a1, b1, a3, b3, k).ok()
}

/// Trace zero, det > 0, otherwise uniform. Every sampler keeps `K` in `K_RANGE`.
pub fn elliptic(rng: &mut ChaCha8Rng, max: f64) -> CanonicalParams {
    retry(rng, |r| {
        let k = r.gen_range(K_RANGE.0..K_RANGE.1);
        let b3 = r.gen_range(-max..max);
        accept(
            params(
                k * b3,
                r.gen_range(-max..max),
                r.gen_range(-max..max),
                b3,
                k,
            )?,
            max,
        )
    })
}

/// `L1 = 0` with `D != 0`: `b1 = a3 (1 - b3) K / D`.
pub fn l1_zero_case_b(rng: &mut ChaCha8Rng, max: f64) -> CanonicalParams {
    retry(rng, |r| {
        let k = r.gen_range(K_RANGE.0..K_RANGE.1);
        let (a3, b3) = (r.gen_range(-max..max), r.gen_range(-max..max));
        let d = 1.0 + a3 - a3 * k - b3 * k;
        if d.abs() < 1e-3 {
            return None;
        }
        accept(params(k * b3, a3 * (1.0 - b3) * k / d, a3, b3, k)?, max)
    })
}

/// `b3 = K = a1 = 1`.
pub fn l1_zero_case_c2(rng: &mut ChaCha8Rng, max: f64) -> CanonicalParams {
    retry(rng, |r| {
        accept(
            params(
                1.0,
                r.gen_range(-max..max),
                r.gen_range(-max..max),
                1.0,
                1.0,
            )?,
            max,
        )
    })
}

/// Parameters satisfying one row of the center table.
pub fn row(rng: &mut ChaCha8Rng, case: CenterCase, max: f64) -> CanonicalParams {
    retry(rng, |r| {
        let u = |r: &mut ChaCha8Rng| r.gen_range(-max..max);
        let c = match case {
            CenterCase::I => params(0.0, u(r), u(r), 0.0, r.gen_range(K_RANGE.0..K_RANGE.1))?,
            CenterCase::II => {
                let (a3, b1) = (u(r), u(r));
                let (a1, b3) = (a3 + 1.0, b1 + 1.0);
                params(a1, b1, a3, b3, a1 / b3)?
            }
            CenterCase::III => {
                let a1 = r.gen_range(K_RANGE.0..K_RANGE.1.min(max));
                params(a1, u(r), -1.0, 1.0, a1)?
            }
            CenterCase::IV => {
                let b3 = r.gen_range(1.0 / K_RANGE.1..max.min(1.0 / K_RANGE.0));
                params(1.0, -1.0, u(r), b3, 1.0 / b3)?
            }
            CenterCase::R1 => {
                let (a1, b1) = (u(r), u(r));
                params(a1, b1, b1, a1, 1.0)?
            }
            CenterCase::R2 => {
                let (b1, b3) = (u(r), u(r));
                let k = 1.0 / (b3 - b1 - 1.0);
                params(k * b3, b1, k * b1, b3, k)?
            }
        };
        accept(c, max).filter(|c| case.matches(c))
    })
}

/// `a1 = b3 = b1 + 2`, `a3 = b1`, `K = 1`, `b1 < -1`.
pub fn intersection(rng: &mut ChaCha8Rng, max: f64) -> CanonicalParams {
    retry(rng, |r| {
        let b1 = r.gen_range(-max..-1.0);
        accept(params(b1 + 2.0, b1, b1, b1 + 2.0, 1.0)?, max)
    })
}
