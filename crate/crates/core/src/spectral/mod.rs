//! Periodic spectral discretization of `ℝⁿ` by the torus `[0, L)ⁿ`.
//!
//! Homogeneous norms drop the zero mode:
//! `‖f‖²_{Ḣ^s} = L^n Σ_{k≠0} |ξ_k|^{2s} |f̂_k|²`.

mod field;
mod grid;
mod nonlinear;
mod norms;
mod projection;
mod random;
mod snapshot;

pub use field::{Field, ScalarField, VectorField, SOLENOIDAL_TOL};
pub use grid::{make_grid, SpectralGrid, MAX_GRID_POINTS};
pub use nonlinear::{advect, advect_vec, l2_pairing, product, scalar_times_vector, Transport};
pub use norms::{hdot_norm, lambda_power, lp_norm, parseval_l2, NormSpec};
pub use projection::{gradient_part, helmholtz_split, leray_project};
pub use random::{random_field, random_solenoidal, NormTarget, SpectrumSpec};
pub use snapshot::{FieldSnapshot, SnapshotField, SnapshotHeader, MODE_ORDERING, SNAPSHOT_FORMAT, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};

pub(crate) use grid::ensure_same;
