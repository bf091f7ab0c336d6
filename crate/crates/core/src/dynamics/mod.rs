//! Numerical integration, return maps and limit cycles.

pub mod cycles;
pub mod integrator;
pub mod poincare;

pub use cycles::{
    bautin_scenario, bautin_scenario_with, detect_limit_cycles, detect_limit_cycles_with,
    displacement_profile, BautinOptions, BautinReport, BautinStage, FixedPoint, LimitCycleReport,
    ScanOptions, Stability, TraceShift,
};
pub use integrator::{
    integrate, integrate_field, IntegratorOptions, PlanarField, Reversed, StepStats, Termination,
    Trajectory,
};
pub use poincare::{
    first_return, linear_frequency, poincare_return, poincare_return_with, return_orbit,
    ReturnOptions, ReturnRecord, Section,
};
