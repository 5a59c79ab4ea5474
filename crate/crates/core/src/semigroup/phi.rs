//! Exponential-integrator weights.

use crate::error::{Error, Result};
use crate::spectral::SpectralGrid;

const SERIES_SWITCH: f64 = 1e-4;

pub fn phi0(z: f64) -> f64 {
    (-z).exp()
}

/// `(1 - e^{-z})/z`.
pub fn phi1(z: f64) -> f64 {
    if z < SERIES_SWITCH {
        1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0
    } else {
        -(-z).exp_m1() / z
    }
}

/// `(e^{-z} - 1 + z)/z²`.
pub fn phi2(z: f64) -> f64 {
    if z < SERIES_SWITCH {
        0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0
    } else {
        ((-z).exp_m1() + z) / (z * z)
    }
}

/// φ-functions at `z_k = Δt |ξ_k|^{2α}` for every mode of a grid.
#[derive(Clone, Debug)]
pub struct PhiWeights {
    dt: f64,
    rate: Vec<f64>,
    phi0: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
}

impl PhiWeights {
    pub fn new(grid: &SpectralGrid, alpha: f64, dt: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::precondition(format!("alpha = {alpha} must be positive")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::precondition(format!("time step {dt} must be positive")));
        }
        let rate = grid.xi_power(2.0 * alpha);
        let z: Vec<f64> = rate.iter().map(|r| r * dt).collect();
        Ok(PhiWeights {
            dt,
            phi0: z.iter().map(|&z| phi0(z)).collect(),
            phi1: z.iter().map(|&z| phi1(z)).collect(),
            phi2: z.iter().map(|&z| phi2(z)).collect(),
            rate,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `|ξ_k|^{2α}`.
    pub fn rate(&self) -> &[f64] {
        &self.rate
    }

    pub fn phi0(&self) -> &[f64] {
        &self.phi0
    }

    pub fn phi1(&self) -> &[f64] {
        &self.phi1
    }

    pub fn phi2(&self) -> &[f64] {
        &self.phi2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_at_zero() {
        assert_eq!(phi0(0.0), 1.0);
        assert_eq!(phi1(0.0), 1.0);
        assert_eq!(phi2(0.0), 0.5);
    }

    #[test]
    fn series_and_closed_form_agree_at_switch() {
        for z in [0.9e-4, 1.1e-4] {
            let direct1 = -(-z as f64).exp_m1() / z;
            assert!((phi1(z) - direct1).abs() < 1e-15);
            let direct2 = ((-z as f64).exp_m1() + z) / (z * z);
            assert!((phi2(z) - direct2).abs() < 1e-11);
        }
    }

    #[test]
    fn tiny_arguments_keep_digits() {
        let z = 1e-12;
        assert!((phi1(z) - (1.0 - 5e-13)).abs() < 1e-16);
        assert!((phi2(z) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn large_arguments() {
        let z = 1e3;
        assert!((phi1(z) - 1e-3).abs() < 1e-18);
        assert!((phi2(z) - (z - 1.0) / (z * z)).abs() < 1e-18);
    }
}
