//! Weak-coupling formulas, threshold curves, dominance maps, collision
//! fits and the `p₁` bound.

pub mod collision;
pub mod csv;
pub mod perturbative;
pub mod regimes;
pub mod sweep;

pub use collision::{fit_collision_exponents, p1_upper_bound_check, BoundReport, BoundRow, FitResult, FitSample};
pub use perturbative::{
    infinite_temperature_closed_form, zero_temperature_forms, perturbative_fidelity, perturbative_map,
    zero_temperature_comparison, ZeroTemperatureForms, ZeroTemperatureRow,
};
pub use regimes::Regime;
pub use sweep::{
    dominance_region, linspace, logspace, temperature_for, threshold_curve, threshold_table, Dominance, Partial,
    SweepGrid, SweepPoint, ThresholdOptions, ThresholdPoint, ThresholdRow, ThresholdStatus,
};
