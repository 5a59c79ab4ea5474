//! Pseudo-spectral mild-solution solver and estimate audits for the
//! fractional Boussinesq system
//!
//! ```text
//! ∂_t u + (-Δ)^α u + u·∇u + ∇π = θ e_n,   ∇·u = 0,
//! ∂_t θ + (-Δ)^α θ + u·∇θ = 0,
//! ```
//!
//! posed on a periodic box. The crate is organized bottom-up:
//!
//! * [`spectral`]: grids, transforms, fractional multipliers, homogeneous
//!   Sobolev norms, Helmholtz projection, dealiased products, random fields.
//! * [`calculus`]: empirical constants of the commutator, product,
//!   advection, embedding and interpolation inequalities.
//! * [`semigroup`]: `e^{-t(-Δ)^α}`, Duhamel integrals by exponential
//!   quadrature, maximal regularity and trajectory norms.
//! * [`solver`]: Picard iteration of the mild equations, an ETD2 marching
//!   oracle, measured contraction constants, pressure recovery, scaling and
//!   uniqueness probes.
//! * [`output`]: deterministic JSON/CSV emission.

pub mod calculus;
pub mod error;
pub mod output;
pub mod semigroup;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
