//! Focal values: closed forms, a numerical Lyapunov-quantity engine, and a
//! return-map sign probe.

pub mod closed_form;
pub mod lyapunov;
pub mod probe;
pub mod taylor;

pub use closed_form::{
    closed_form_focal, closed_form_focal_with, d_value, Factor, FocalBranch, FocalValues,
};
pub use lyapunov::{lyapunov_numeric, LyapunovQuantities, LYAPUNOV_ZERO_TOL};
pub use probe::{return_map_sign_probe, SignProbe};
pub use taylor::{taylor_expand, TaylorField};

/// Truncation degree sufficient for `ℓ1` and `ℓ2`.
pub const L2_DEGREE: usize = 5;

/// `ℓ1, ℓ2` straight from canonical parameters.
pub fn lyapunov_from_params(
    c: &crate::model::CanonicalParams,
) -> crate::Result<LyapunovQuantities> {
    let tf = taylor_expand(c, L2_DEGREE)?;
    lyapunov_numeric(&tf, 2)
}
