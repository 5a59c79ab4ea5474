use serde::{Deserialize, Serialize};

use super::field::{Field, ScalarField};
use crate::error::{Error, Result};

/// Which norm a target or an audit refers to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NormSpec {
    Hdot { s: f64 },
    Lebesgue { p: f64 },
}

impl NormSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NormSpec::Hdot { s } if s.is_finite() => Ok(()),
            NormSpec::Lebesgue { p } if p.is_finite() && p >= 1.0 => Ok(()),
            other => Err(Error::precondition(format!("invalid norm {other:?}"))),
        }
    }

    pub fn evaluate<F: Field>(&self, f: &F) -> Result<f64> {
        self.validate()?;
        match *self {
            NormSpec::Hdot { s } => Ok(f.hdot_norm(s)),
            NormSpec::Lebesgue { p } => lp_norm_channels(f, p),
        }
    }
}

/// `Λ^s f`: multiply mode `k` by `|ξ_k|^s`; the zero mode is always annihilated.
pub fn lambda_power(f: &ScalarField, s: f64) -> ScalarField {
    let mut out = f.clone();
    apply_lambda(&mut out, s);
    out
}

pub(crate) fn apply_lambda<F: Field>(f: &mut F, s: f64) {
    let logq = f.grid().log_xi_norm().to_vec();
    f.apply_symbol(|i| if i == 0 { 0.0 } else { (s * logq[i]).exp() });
}

pub fn hdot_norm<F: Field>(f: &F, s: f64) -> f64 {
    f.hdot_norm(s)
}

/// Collocation `L^p` norm `(Σ_j |f(x_j)|^p (L/N)^n)^{1/p}`.
///
/// Exact for `p = 2` on any coefficient array (discrete Parseval); for other
/// `p` it is a quadrature of modest accuracy.
pub fn lp_norm(f: &ScalarField, p: f64) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::precondition(format!("L^p exponent {p} outside [1, inf)")));
    }
    let values = f.to_physical_real()?;
    Ok(lp_of_samples(&values, p, f.grid().cell_volume()))
}

pub(crate) fn lp_of_samples(values: &[f64], p: f64, cell: f64) -> f64 {
    let sum: f64 = if p == 2.0 {
        values.iter().map(|v| v * v).sum()
    } else {
        values.iter().map(|v| v.abs().powf(p)).sum()
    };
    (sum * cell).powf(1.0 / p)
}

/// `L^p` norm of the pointwise Euclidean magnitude across channels.
fn lp_norm_channels<F: Field>(f: &F, p: f64) -> Result<f64> {
    let grid = f.grid().clone();
    let mut mag = vec![0.0; grid.len()];
    for c in 0..f.channel_count() {
        let chan = ScalarField::from_coeffs(&grid, f.channel(c).to_vec(), true)?;
        for (m, v) in mag.iter_mut().zip(chan.to_physical()) {
            *m += v.re * v.re;
        }
    }
    for m in &mut mag {
        *m = m.sqrt();
    }
    Ok(lp_of_samples(&mag, p, grid.cell_volume()))
}

/// `L^n Σ_k |f̂_k|²` including the zero mode.
pub fn parseval_l2(f: &ScalarField) -> f64 {
    let sum: f64 = f.coeffs().iter().map(|z| z.norm_sqr()).sum();
    (sum * f.grid().volume()).sqrt()
}
