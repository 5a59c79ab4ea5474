//! Seeded initial data sized against the measured data budget.

use serde::{Deserialize, Serialize};

use super::config::{Constants, SolverConfig};
use crate::calculus::SECOND_STREAM;
use crate::error::{Error, Result};
use crate::spectral::{
    random_field, random_solenoidal, NormSpec, NormTarget, ScalarField, SpectrumSpec, VectorField,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Amplitude {
    /// `‖u₀‖_{Ḣ^{s₀}} + w‖θ₀‖ = fraction · 1/(96(k₂+k₃))`, of which
    /// `velocity_share` goes to the velocity.
    ThresholdFraction { fraction: f64, velocity_share: f64 },
    /// `‖u₀‖_{Ḣ^{s₀}}` and `‖θ₀‖` at the data index, directly.
    Norms { velocity: f64, theta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    pub band: [f64; 2],
    pub slope: f64,
    pub seed: u64,
    pub amplitude: Amplitude,
}

fn spectrum(spec: &DataSpec, s: f64, value: f64) -> SpectrumSpec {
    SpectrumSpec::new(
        spec.band[0],
        spec.band[1],
        spec.slope,
        NormTarget {
            norm: NormSpec::Hdot { s },
            value,
        },
    )
}

/// Target norms `(‖u₀‖_{Ḣ^{s₀}}, ‖θ₀‖)` for `spec`.
pub fn data_norms(spec: &DataSpec, cfg: &SolverConfig, k: &Constants) -> Result<(f64, f64)> {
    let (u, t) = match spec.amplitude {
        Amplitude::ThresholdFraction {
            fraction,
            velocity_share,
        } => {
            if !(0.0..=1.0).contains(&velocity_share) {
                return Err(Error::precondition(format!(
                    "velocity_share = {velocity_share} must lie in [0, 1]"
                )));
            }
            k.validate()?;
            let d = fraction * k.data_budget();
            (velocity_share * d, (1.0 - velocity_share) * d / cfg.theta_weight(k.k1))
        }
        Amplitude::Norms { velocity, theta } => (velocity, theta),
    };
    if !(u.is_finite() && t.is_finite() && u >= 0.0 && t >= 0.0) {
        return Err(Error::precondition(format!("data norms ({u}, {t}) must be nonnegative")));
    }
    Ok((u, t))
}

/// Solenoidal `u₀` from `seed` and `θ₀` from a separate stream, both real,
/// mean-free and band-limited.
pub fn initial_data(
    spec: &DataSpec,
    cfg: &SolverConfig,
    k: &Constants,
) -> Result<(VectorField, ScalarField)> {
    let (nu, nt) = data_norms(spec, cfg, k)?;
    let grid = cfg.grid()?;
    let u = random_solenoidal(&grid, &spectrum(spec, cfg.s0(), nu), spec.seed)?;
    let t = random_field(
        &grid,
        &spectrum(spec, cfg.theta_data_index(), nt),
        spec.seed.wrapping_add(SECOND_STREAM),
    )?;
    Ok((u, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Mode;
    use crate::spectral::Field;
    use std::f64::consts::PI;

    #[test]
    fn threshold_fraction_splits_the_budget() {
        let cfg = SolverConfig {
            n: 3,
            alpha: 1.0,
            horizon: 4.0,
            modes: 8,
            length: 2.0 * PI,
            time_steps: 4,
            picard_tol: 1e-10,
            picard_max_iters: 5,
            mode: Mode::FiniteHorizon,
        };
        let k = Constants { k1: 0.5, k2: 1.0, k3: 2.0 };
        let spec = DataSpec {
            band: [1.0, 2.0],
            slope: 0.0,
            seed: 9,
            amplitude: Amplitude::ThresholdFraction {
                fraction: 0.5,
                velocity_share: 0.25,
            },
        };
        let (u, t) = initial_data(&spec, &cfg, &k).unwrap();
        let w = cfg.theta_weight(k.k1);
        assert_eq!(w, 2.0);
        let total = u.hdot_norm(cfg.s0()) + w * t.hdot_norm(cfg.theta_data_index());
        assert!((total - 0.5 / 288.0).abs() < 1e-15);
        assert!((u.hdot_norm(cfg.s0()) - 0.25 * 0.5 / 288.0).abs() < 1e-15);
        assert!(u.is_solenoidal() && u.is_real() && t.is_real());
    }
}
