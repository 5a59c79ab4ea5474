use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semigroup::{NormIndices, TimeGrid};
use crate::spectral::{make_grid, SpectralGrid};

/// Which critical couple the norms are built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `θ ∈ C([0,T]; Ḣ^{s₀-α})`, finite horizon; needs `1/2 < α < (2+n)/4`.
    FiniteHorizon,
    /// `θ ∈ C([0,T]; Ḣ^{s₀-2α})`, scaling-invariant; needs `1/2 < α < 1/3 + n/6`.
    GlobalScaling,
}

/// Physical and numerical parameters. Every dissipation coefficient is 1 and
/// both equations carry the same `(-Δ)^α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub n: usize,
    pub alpha: f64,
    pub horizon: f64,
    pub modes: usize,
    pub length: f64,
    pub time_steps: usize,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub mode: Mode,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::precondition(format!("n = {} must be at least 2", self.n)));
        }
        let nf = self.n as f64;
        let (upper, rule) = match self.mode {
            Mode::FiniteHorizon => ((2.0 + nf) / 4.0, "1/2 < alpha < (2+n)/4"),
            Mode::GlobalScaling => (1.0 / 3.0 + nf / 6.0, "1/2 < alpha < 1/3 + n/6"),
        };
        if !(self.alpha > 0.5 && self.alpha < upper) {
            return Err(Error::precondition(format!(
                "{:?} mode requires {rule} = {upper} for n = {}, got alpha = {}",
                self.mode, self.n, self.alpha
            )));
        }
        if !(self.picard_tol.is_finite() && self.picard_tol > 0.0) {
            return Err(Error::precondition(format!(
                "picard_tol = {} must be positive",
                self.picard_tol
            )));
        }
        if self.picard_max_iters == 0 {
            return Err(Error::precondition("picard_max_iters must be at least 1"));
        }
        self.time()?;
        make_grid(self.n, self.modes, self.length)?;
        Ok(())
    }

    /// `s₀ = 1 + n/2 - 2α`.
    pub fn s0(&self) -> f64 {
        1.0 + self.n as f64 / 2.0 - 2.0 * self.alpha
    }

    /// `(s₀, s₀+α, s₀-α)`.
    pub fn x_indices(&self) -> NormIndices {
        NormIndices::parabolic(self.s0() - self.alpha, self.alpha)
    }

    /// `(s₀-α, s₀, s₀-2α)` or, in the scaling mode, `(s₀-2α, s₀-α, s₀-3α)`.
    pub fn y_indices(&self) -> NormIndices {
        match self.mode {
            Mode::FiniteHorizon => NormIndices::parabolic(self.s0() - 2.0 * self.alpha, self.alpha),
            Mode::GlobalScaling => NormIndices::parabolic(self.s0() - 3.0 * self.alpha, self.alpha),
        }
    }

    /// Index of the initial temperature norm.
    pub fn theta_data_index(&self) -> f64 {
        self.y_indices().sup
    }

    /// Weight of the temperature norm in the product space: `2k₁T^{1/2}`, or
    /// `2k₁` in the scaling mode.
    pub fn theta_weight(&self, k1: f64) -> f64 {
        match self.mode {
            Mode::FiniteHorizon => 2.0 * k1 * self.horizon.sqrt(),
            Mode::GlobalScaling => 2.0 * k1,
        }
    }

    pub fn grid(&self) -> Result<Arc<SpectralGrid>> {
        make_grid(self.n, self.modes, self.length)
    }

    pub fn time(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.horizon, self.time_steps)
    }
}

/// Measured operator-norm constants of the three integral maps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl Constants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k1", self.k1), ("k2", self.k2), ("k3", self.k3)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::precondition(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// `1/(32(k₂+k₃))`: the largest `K₀` for which the fixed point closes.
    pub fn smallness_threshold(&self) -> f64 {
        1.0 / (32.0 * (self.k2 + self.k3))
    }

    /// `1/(96(k₂+k₃))`: the data budget for `‖u₀‖ + w‖θ₀‖`.
    pub fn data_budget(&self) -> f64 {
        1.0 / (96.0 * (self.k2 + self.k3))
    }
}
