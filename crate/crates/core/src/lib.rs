//! Center-focus analysis for the generalized Lotka power-law system
//!
//! ```text
//! dx/dt = x^a1 y^b1 - 1
//! dy/dt = K (1 - x^a3 y^b3)
//! ```
//!
//! on the open positive quadrant, with equilibrium `(1, 1)`.
//!
//! The crate decides whether the equilibrium is a center from closed-form
//! focal values and the six algebraic center cases, and backs every verdict
//! with independent numerics:
//!
//! - [`model`]: raw and canonical parameterizations, vector field, Jacobian.
//! - [`focal`]: closed-form focal values, a Taylor/normal-form Lyapunov
//!   quantity engine, and a return-map sign probe.
//! - [`classifier`]: center / focus / degenerate verdicts with an algebraic witness.
//! - [`conserved`]: first integrals and integrating factors of the known center cases.
//! - [`symmetry`]: reversibility identities for the two reversible center cases.
//! - [`dynamics`]: adaptive integration, Poincaré return maps, limit-cycle detection
//!   and the two-cycle degenerate Hopf construction.

pub mod classifier;
pub mod conserved;
pub mod dynamics;
mod error;
pub mod focal;
pub mod model;
pub mod symmetry;
pub mod tol;

pub use classifier::{
    classify, classify_with, linear_type, match_table_cases, match_table_cases_with, CenterCase,
    CenterClassification, LinearType, Verdict, Witness,
};
pub use error::{Error, Result};
pub use model::{CanonicalParams, DancsoParams, JacobianSummary, Point, RawLotkaParams};
pub use tol::Tolerances;
