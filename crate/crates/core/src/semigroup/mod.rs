//! The analytic semigroup `e^{-t(-Δ)^α}` on the torus, Duhamel integrals and
//! the space-time norms built on them.

mod audit;
mod duhamel;
mod ops;
mod phi;
mod trajectory;

pub use audit::{
    semigroup_audit, MaxRegularityResult, SemigroupAuditReport, SemigroupAuditSpec, SemigroupSample,
    SmoothingResult,
};
pub use duhamel::{duhamel, duhamel_step, energy_bound, max_regularity_ratio, rate_from_equation};
pub use ops::{
    char_integral, char_integral_raw, free_functional, free_solution, heat_flow, imaginary_power,
    smoothing_bound, smoothing_ratio, FreeFunctional, CHAR_PREFACTOR,
};
pub use phi::{phi0, phi1, phi2, PhiWeights};
pub use trajectory::{
    NormIndices, NormProfile, TimeGrid, Trajectory, TrajectoryHeader, TRAJECTORY_FORMAT,
    TRAJECTORY_MAGIC,
};
