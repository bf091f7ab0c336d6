//! Displacement scans, limit-cycle detection, and the two-cycle degenerate Hopf construction.

use std::fmt;

use super::poincare::{poincare_return_with, ReturnOptions};
use crate::error::{Error, Result};
use crate::focal::closed_form_focal;
use crate::model::CanonicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    /// Section coordinate of the cycle.
    pub x: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitCycleReport {
    pub fixed_points: Vec<FixedPoint>,
    /// `(radius, displacement)` at every scanned radius that returned.
    pub scan: Vec<(f64, f64)>,
    /// Radius at which the scan stopped because the orbit did not return.
    pub escaped_at: Option<f64>,
}

impl LimitCycleReport {
    /// Displacement signs along the scan (0 inside the noise floor).
    pub fn sign_pattern(&self, noise: f64) -> Vec<i8> {
        let mut out: Vec<i8> = Vec::new();
        for &(_, d) in &self.scan {
            let s = crate::tol::sign(d, noise);
            if s != 0 && out.last() != Some(&s) {
                out.push(s);
            }
        }
        out
    }
}

impl fmt::Display for LimitCycleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cycles={}", self.fixed_points.len())?;
        for p in &self.fixed_points {
            write!(f, " [x={} {:?}]", p.x, p.stability)?;
        }
        if let Some(r) = self.escaped_at {
            write!(f, " escaped_at={r}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub rel_tol: f64,
    /// Displacements with `|d| <= noise` count as zero.
    pub noise: f64,
    /// Bisection target for `|d|` at a located cycle.
    pub root_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            rel_tol: 1e-11,
            noise: 1e-9,
            root_tol: 1e-10,
        }
    }
}

fn displacement(c: &CanonicalParams, r: f64, rel_tol: f64) -> Result<f64> {
    poincare_return_with(c, 1.0 + r, &ReturnOptions::new(rel_tol)).map(|rec| rec.displacement)
}

/// Return-map displacement at `x0 = 1 + r` for each radius.
pub fn displacement_profile(
    c: &CanonicalParams,
    radii: &[f64],
    rel_tol: f64,
) -> Vec<(f64, Result<f64>)> {
    radii
        .iter()
        .map(|&r| (r, displacement(c, r, rel_tol)))
        .collect()
}

/// Scans `n_scan` radii in `[r_min, r_max]` and bisects every sign change of the
/// displacement down to `root_tol`.
pub fn detect_limit_cycles_with(
    c: &CanonicalParams,
    r_min: f64,
    r_max: f64,
    n_scan: usize,
    opts: &ScanOptions,
) -> Result<LimitCycleReport> {
    if !(r_min > 0.0 && r_max > r_min && n_scan >= 2) {
        return Err(Error::InvalidParameter(
            "need 0 < rMin < rMax and nScan >= 2".into(),
        ));
    }
    let mut scan = Vec::with_capacity(n_scan);
    let mut escaped_at = None;
    for i in 0..n_scan {
        let r = r_min + (r_max - r_min) * i as f64 / (n_scan - 1) as f64;
        match displacement(c, r, opts.rel_tol) {
            Ok(d) => scan.push((r, d)),
            Err(Error::NoReturn(_)) => {
                escaped_at = Some(r);
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let mut fixed_points = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for &(r, d) in &scan {
        if d.abs() <= opts.noise {
            continue;
        }
        if let Some((rp, dp)) = last {
            if (dp > 0.0) != (d > 0.0) {
                let root = bisect(c, (rp, dp), (r, d), opts)?;
                let stability = if dp > 0.0 {
                    Stability::Stable
                } else {
                    Stability::Unstable
                };
                fixed_points.push(FixedPoint {
                    x: 1.0 + root,
                    stability,
                });
            }
        }
        last = Some((r, d));
    }
    Ok(LimitCycleReport {
        fixed_points,
        scan,
        escaped_at,
    })
}

pub fn detect_limit_cycles(
    c: &CanonicalParams,
    r_min: f64,
    r_max: f64,
    n_scan: usize,
) -> Result<LimitCycleReport> {
    detect_limit_cycles_with(c, r_min, r_max, n_scan, &ScanOptions::default())
}

fn bisect(c: &CanonicalParams, lo: (f64, f64), hi: (f64, f64), opts: &ScanOptions) -> Result<f64> {
    let (mut a, mut da) = lo;
    let (mut b, _) = hi;
    let mut mid = 0.5 * (a + b);
    for _ in 0..200 {
        mid = 0.5 * (a + b);
        let dm = displacement(c, mid, opts.rel_tol)?;
        if dm.abs() <= opts.root_tol || b - a <= 1e-14 * b {
            break;
        }
        if (dm > 0.0) == (da > 0.0) {
            a = mid;
            da = dm;
        } else {
            b = mid;
        }
    }
    Ok(mid)
}

/// How the trace perturbation of the second stage is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceShift {
    /// Only the first stage (trace stays 0).
    None,
    Fixed(f64),
    /// Bisect for the largest shift that still shows two cycles.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BautinStage {
    pub params: CanonicalParams,
    pub trace: f64,
    /// Closed-form values on the trace-free slice (`None` off it).
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub report: LimitCycleReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BautinReport {
    pub base: CanonicalParams,
    pub base_l2: f64,
    pub delta_k: f64,
    pub k_stage: BautinStage,
    /// Trace shift `ε` with `a1 = K - ε`, and the resulting stage.
    pub trace_stage: Option<(f64, BautinStage)>,
}

impl BautinReport {
    pub fn final_report(&self) -> &LimitCycleReport {
        match &self.trace_stage {
            Some((_, s)) => &s.report,
            None => &self.k_stage.report,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BautinOptions {
    pub r_min: f64,
    pub r_max: f64,
    pub n_scan: usize,
    pub scan: ScanOptions,
    /// Bisection steps for the automatic trace shift.
    pub shift_iterations: usize,
}

impl Default for BautinOptions {
    fn default() -> Self {
        BautinOptions {
            r_min: 1e-3,
            r_max: 3.0,
            n_scan: 100,
            scan: ScanOptions::default(),
            shift_iterations: 12,
        }
    }
}

pub fn bautin_scenario(b1: f64, a3: f64, delta_k: f64, shift: TraceShift) -> Result<BautinReport> {
    bautin_scenario_with(b1, a3, delta_k, shift, &BautinOptions::default())
}

/// Two-stage perturbation of the weak focus `b3 = a1 = K = 1`:
/// first `K = 1 + δK` with `a1 = K` (trace 0, `L1` of the opposite sign to
/// `L2`), then `a1 = K - ε`.
pub fn bautin_scenario_with(
    b1: f64,
    a3: f64,
    delta_k: f64,
    shift: TraceShift,
    opts: &BautinOptions,
) -> Result<BautinReport> {
    let base = CanonicalParams::new(1.0, b1, a3, 1.0, 1.0)?;
    let base_focal = closed_form_focal(&base)?;
    let base_l2 = base_focal.l2.unwrap_or(0.0);
    if !(base_l2 < 0.0) || base_focal.l2_vanishes() {
        return Err(Error::BadBase(base_l2));
    }
    let k = 1.0 + delta_k;
    let stage = |a1: f64| -> Result<BautinStage> {
        let params = CanonicalParams::new(a1, b1, a3, 1.0, k)?;
        let (l1, l2) = match closed_form_focal(&params) {
            Ok(f) => (Some(f.l1), f.l2),
            Err(_) => (None, None),
        };
        let report =
            detect_limit_cycles_with(&params, opts.r_min, opts.r_max, opts.n_scan, &opts.scan)?;
        Ok(BautinStage {
            params,
            trace: params.trace(),
            l1,
            l2,
            report,
        })
    };
    let k_stage = stage(k)?;
    let trace_stage = match shift {
        TraceShift::None => None,
        TraceShift::Fixed(eps) => Some((eps, stage(k - eps)?)),
        TraceShift::Auto => {
            let two = |s: &BautinStage| s.report.fixed_points.len() == 2;
            // grow until two cycles are lost, then bisect the boundary
            let mut lo = (0.0, None::<BautinStage>);
            let mut hi = None;
            let mut eps = 1e-5;
            for _ in 0..40 {
                let s = stage(k - eps)?;
                if two(&s) {
                    lo = (eps, Some(s));
                    eps *= 2.0;
                } else if lo.1.is_some() || eps > 0.5 {
                    hi = Some(eps);
                    break;
                } else {
                    eps *= 2.0;
                }
            }
            match (lo, hi) {
                ((e_lo, Some(s_lo)), Some(e_hi)) => {
                    let (mut e_lo, mut s_lo, mut e_hi) = (e_lo, s_lo, e_hi);
                    for _ in 0..opts.shift_iterations {
                        let mid = 0.5 * (e_lo + e_hi);
                        let s = stage(k - mid)?;
                        if two(&s) {
                            e_lo = mid;
                            s_lo = s;
                        } else {
                            e_hi = mid;
                        }
                    }
                    Some((e_lo, s_lo))
                }
                ((e, Some(s)), None) => Some((e, s)),
                _ => {
                    let s = stage(k - eps)?;
                    Some((eps, s))
                }
            }
        }
    };
    Ok(BautinReport {
        base,
        base_l2,
        delta_k,
        k_stage,
        trace_stage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(a1: f64, b1: f64, a3: f64, b3: f64, k: f64) -> CanonicalParams {
        CanonicalParams::new(a1, b1, a3, b3, k).unwrap()
    }

    #[test]
    fn center_has_no_cycles() {
        let rep = detect_limit_cycles(&cp(0.0, 1.0, 1.0, 0.0, 2.0), 0.01, 0.5, 12).unwrap();
        assert!(rep.fixed_points.is_empty(), "{rep}");
        assert!(rep.sign_pattern(1e-9).is_empty());
    }

    #[test]
    fn first_stage_has_one_stable_cycle() {
        let c = cp(1.02, -2.0, -3.0, 1.0, 1.02);
        let rep = detect_limit_cycles(&c, 1e-3, 3.0, 60).unwrap();
        assert_eq!(rep.fixed_points.len(), 1, "{rep}");
        assert_eq!(rep.fixed_points[0].stability, Stability::Stable);
        assert_eq!(rep.sign_pattern(1e-9), vec![1, -1]);
        let x = rep.fixed_points[0].x;
        let d = poincare_return_with(&c, x, &ReturnOptions::new(1e-11))
            .unwrap()
            .displacement;
        assert!(d.abs() <= 1e-9, "{d}");
    }

    #[test]
    fn profile_reports_each_radius() {
        let prof = displacement_profile(&cp(1.0, 2.0, 1.0, 1.0, 1.0), &[0.05, 0.1], 1e-11);
        assert_eq!(prof.len(), 2);
        assert!(prof.iter().all(|(_, d)| *d.as_ref().unwrap() < 0.0));
    }

    #[test]
    fn bad_base_and_ranges() {
        // (b1, a3) = (2, 3): L2 ∝ a3 (1 + a3)(1 + b1)(a3 - b1)/b1 > 0
        assert!(matches!(
            bautin_scenario(2.0, 3.0, 0.02, TraceShift::None),
            Err(Error::BadBase(_))
        ));
        assert!(detect_limit_cycles(&cp(0.0, 1.0, 1.0, 0.0, 1.0), 0.5, 0.1, 10).is_err());
    }
}
