//! Ratio audits `LHS / RHS` of the calculus inequalities over a corpus.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::commutator::commutator;
use super::corpus::{CorpusSpec, SamplePoint};
use crate::error::{Error, Result};
use crate::spectral::{advect, lp_norm, scalar_times_vector, Field, ScalarField};

/// Samples whose right-hand side falls below this are skipped.
pub const RHS_FLOOR: f64 = 1e-30;
const RELATION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    Kpv,
    Product,
    Uf1,
    Uf2,
    Uf3,
    Embedding,
    Interpolation,
}

impl InequalityId {
    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityId::Kpv => "kpv",
            InequalityId::Product => "product",
            InequalityId::Uf1 => "uf1",
            InequalityId::Uf2 => "uf2",
            InequalityId::Uf3 => "uf3",
            InequalityId::Embedding => "embedding",
            InequalityId::Interpolation => "interpolation",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated sample; `ratio` is `None` when the sample was skipped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditSample {
    pub inequality_id: InequalityId,
    pub seed: u64,
    pub band: String,
    pub modes: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolutionMax {
    pub modes: usize,
    pub sample_count: usize,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub inequality_id: InequalityId,
    pub exponents: BTreeMap<String, f64>,
    pub sample_count: usize,
    pub skipped: usize,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub per_resolution: Vec<ResolutionMax>,
}

impl RatioReport {
    /// Largest relative spread `|max_N - max_{N'}| / max_N` across resolutions.
    pub fn resolution_spread(&self) -> f64 {
        let maxes: Vec<f64> = self.per_resolution.iter().map(|r| r.max_ratio).collect();
        let hi = maxes.iter().copied().fold(f64::MIN, f64::max);
        let lo = maxes.iter().copied().fold(f64::MAX, f64::min);
        if hi <= 0.0 {
            0.0
        } else {
            (hi - lo) / lo.max(f64::MIN_POSITIVE)
        }
    }

    /// `exponents` rendered as `name=value;...` for CSV rows.
    pub fn exponent_label(&self) -> String {
        self.exponents
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Report and the per-sample rows behind it.
#[derive(Clone, Debug)]
pub struct Audit {
    pub report: RatioReport,
    pub samples: Vec<AuditSample>,
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

fn run<E>(
    corpus: &CorpusSpec,
    id: InequalityId,
    exponents: BTreeMap<String, f64>,
    eval: E,
) -> Result<Audit>
where
    E: Fn(&SamplePoint) -> Result<(f64, f64)> + Sync,
{
    corpus.validate()?;
    let points = corpus.samples()?;
    let results: Vec<Result<(f64, f64)>> = points.par_iter().map(&eval).collect();
    let mut samples = Vec::with_capacity(points.len());
    for (p, r) in points.iter().zip(results) {
        let (lhs, rhs) = r?;
        if !(lhs.is_finite() && rhs.is_finite()) {
            return Err(Error::DegenerateCorpus(format!(
                "{id}: non-finite sample lhs={lhs} rhs={rhs} (seed {})",
                p.seed
            )));
        }
        samples.push(AuditSample {
            inequality_id: id,
            seed: p.seed,
            band: corpus.bands[p.band].name.clone(),
            modes: p.grid.modes(),
            lhs,
            rhs,
            ratio: (rhs >= RHS_FLOOR).then(|| lhs / rhs),
        });
    }
    let per_resolution = corpus
        .resolutions
        .iter()
        .map(|&m| {
            let ratios: Vec<f64> = samples
                .iter()
                .filter(|s| s.modes == m)
                .filter_map(|s| s.ratio)
                .collect();
            ResolutionMax {
                modes: m,
                sample_count: ratios.len(),
                max_ratio: ratios.iter().copied().fold(0.0, f64::max),
            }
        })
        .collect();
    let mut ratios: Vec<f64> = samples.iter().filter_map(|s| s.ratio).collect();
    let report = RatioReport {
        inequality_id: id,
        exponents,
        sample_count: ratios.len(),
        skipped: samples.len() - ratios.len(),
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        median_ratio: median(&mut ratios),
        per_resolution,
    };
    Ok(Audit { report, samples })
}

fn exps(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= RELATION_TOL * (1.0 + a.abs().max(b.abs()))
}

/// `‖R_s(f,g)‖_p ≤ C ‖Λ^{s₁} f‖_q ‖Λ^{s₂} g‖_r` with `0 < s, s₁, s₂ < 1`,
/// `s₁ + s₂ = 1` and `1/p = 1/q + 1/r`.
pub fn audit_kpv(
    corpus: &CorpusSpec,
    s: f64,
    s1: f64,
    s2: f64,
    p: f64,
    q: f64,
    r: f64,
) -> Result<Audit> {
    let unit = |x: f64| x > 0.0 && x < 1.0;
    if !(unit(s) && unit(s1) && unit(s2)) {
        return Err(Error::precondition(format!(
            "need 0 < s, s1, s2 < 1, got s={s} s1={s1} s2={s2}"
        )));
    }
    if !close(s1 + s2, 1.0) {
        return Err(Error::precondition(format!("need s1 + s2 = 1, got {}", s1 + s2)));
    }
    let finite = |x: f64| x.is_finite() && x > 1.0;
    if !(finite(p) && finite(q) && finite(r)) {
        return Err(Error::precondition(format!(
            "need 1 < p, q, r < inf, got p={p} q={q} r={r}"
        )));
    }
    if !close(1.0 / p, 1.0 / q + 1.0 / r) {
        return Err(Error::precondition(format!(
            "need 1/p = 1/q + 1/r, got p={p} q={q} r={r}"
        )));
    }
    let exponents = exps(&[("s", s), ("s1", s1), ("s2", s2), ("p", p), ("q", q), ("r", r)]);
    run(corpus, InequalityId::Kpv, exponents, |pt| {
        let f = pt.scalar()?;
        let g = pt.second_scalar()?;
        let lhs = lp_norm(&commutator(&f, &g, s)?, p)?;
        let rhs = lp_norm(&crate::spectral::lambda_power(&f, s1), q)?
            * lp_norm(&crate::spectral::lambda_power(&g, s2), r)?;
        Ok((lhs, rhs))
    })
}

/// Checks `|s| < n/2`, `max(s, 0) < s₁, s₂ < n/2`, `s₁ + s₂ = s + n/2`.
pub fn product_exponents_admissible(n: usize, s: f64, s1: f64, s2: f64) -> Result<()> {
    let half = n as f64 / 2.0;
    if !(s.abs() < half) {
        return Err(Error::precondition(format!("need |s| < n/2 = {half}, got s = {s}")));
    }
    let lo = s.max(0.0);
    for (name, v) in [("s1", s1), ("s2", s2)] {
        if !(v > lo && v < half) {
            return Err(Error::precondition(format!(
                "need max(s, 0) = {lo} < {name} < n/2 = {half}, got {name} = {v}"
            )));
        }
    }
    if !close(s1 + s2, s + half) {
        return Err(Error::precondition(format!(
            "need s1 + s2 = s + n/2 = {}, got {}",
            s + half,
            s1 + s2
        )));
    }
    Ok(())
}

/// `‖fg‖_{Ḣ^s} ≤ C ‖f‖_{Ḣ^{s₁}} ‖g‖_{Ḣ^{s₂}}`.
pub fn audit_product(corpus: &CorpusSpec, s: f64, s1: f64, s2: f64) -> Result<Audit> {
    product_exponents_admissible(corpus.n, s, s1, s2)?;
    let exponents = exps(&[("s", s), ("s1", s1), ("s2", s2)]);
    run(corpus, InequalityId::Product, exponents, |pt| {
        let f = pt.scalar()?;
        let g = pt.second_scalar()?;
        let lhs = crate::spectral::product(&f, &g)?.hdot_norm(s);
        Ok((lhs, f.hdot_norm(s1) * g.hdot_norm(s2)))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvectionVariant {
    Uf1,
    Uf2,
    Uf3,
}

/// Sobolev indices `(lhs, u, f)` of an advection estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdvectionIndices {
    pub lhs: f64,
    pub velocity: f64,
    pub scalar: f64,
}

/// Validates `α, ε` and returns the indices, with `s₀ = 1 + n/2 - 2α`:
/// UF1 `‖u·∇f‖_{s₀-α} ≤ C‖u‖_{s₀+ε}‖f‖_{s₀+α-ε}`,
/// UF2 `‖u·∇f‖_{s₀-2α} ≤ C‖u‖_{s₀+ε}‖f‖_{s₀-ε}`,
/// UF3 `‖u·∇f‖_{s₀-3α} ≤ C‖u‖_{s₀+ε}‖f‖_{s₀-α-ε}`.
pub fn advection_indices(
    n: usize,
    variant: AdvectionVariant,
    alpha: f64,
    epsilon: f64,
) -> Result<AdvectionIndices> {
    let nf = n as f64;
    let upper = match variant {
        AdvectionVariant::Uf1 | AdvectionVariant::Uf2 => 0.5 + nf / 4.0,
        AdvectionVariant::Uf3 => 1.0 / 3.0 + nf / 6.0,
    };
    if !(alpha > 0.5 && alpha < upper) {
        return Err(Error::precondition(format!(
            "{variant:?} needs 1/2 < alpha < {upper}, got alpha = {alpha}"
        )));
    }
    let eps_max = (2.0 * alpha - 1.0).min(alpha);
    if !(epsilon >= 0.0 && epsilon < eps_max) {
        return Err(Error::precondition(format!(
            "need 0 <= epsilon < min(2 alpha - 1, alpha) = {eps_max}, got {epsilon}"
        )));
    }
    let s0 = 1.0 + nf / 2.0 - 2.0 * alpha;
    let (lhs, scalar) = match variant {
        AdvectionVariant::Uf1 => (s0 - alpha, s0 + alpha - epsilon),
        AdvectionVariant::Uf2 => (s0 - 2.0 * alpha, s0 - epsilon),
        AdvectionVariant::Uf3 => (s0 - 3.0 * alpha, s0 - alpha - epsilon),
    };
    Ok(AdvectionIndices {
        lhs,
        velocity: s0 + epsilon,
        scalar,
    })
}

/// Advection estimates; UF2 and UF3 evaluate `u·∇f` as `∇·(f u)`.
pub fn audit_advection(
    corpus: &CorpusSpec,
    variant: AdvectionVariant,
    alpha: f64,
    epsilon: f64,
) -> Result<Audit> {
    let idx = advection_indices(corpus.n, variant, alpha, epsilon)?;
    let id = match variant {
        AdvectionVariant::Uf1 => InequalityId::Uf1,
        AdvectionVariant::Uf2 => InequalityId::Uf2,
        AdvectionVariant::Uf3 => InequalityId::Uf3,
    };
    let s0 = 1.0 + corpus.n as f64 / 2.0 - 2.0 * alpha;
    let exponents = exps(&[("alpha", alpha), ("epsilon", epsilon), ("s0", s0)]);
    run(corpus, id, exponents, |pt| {
        let u = pt.solenoidal()?;
        let f = pt.second_scalar()?;
        let transport = match variant {
            AdvectionVariant::Uf1 => advect(&u, &f)?,
            _ => scalar_times_vector(&f, &u)?.divergence(),
        };
        let lhs = transport.hdot_norm(idx.lhs);
        Ok((lhs, u.hdot_norm(idx.velocity) * f.hdot_norm(idx.scalar)))
    })
}

/// `p = 2n/(n - 2s)`.
pub fn embedding_exponent(n: usize, s: f64) -> Result<f64> {
    let half = n as f64 / 2.0;
    if !(s.abs() < half) {
        return Err(Error::precondition(format!("need |s| < n/2 = {half}, got s = {s}")));
    }
    Ok(2.0 * n as f64 / (n as f64 - 2.0 * s))
}

/// `‖f‖_p / ‖f‖_{Ḣ^s}` for `s ≥ 0`, `‖f‖_{Ḣ^s} / ‖f‖_p` for `s < 0`.
pub fn audit_embedding(corpus: &CorpusSpec, s: f64) -> Result<Audit> {
    let p = embedding_exponent(corpus.n, s)?;
    let exponents = exps(&[("s", s), ("p", p)]);
    run(corpus, InequalityId::Embedding, exponents, |pt| {
        let f = pt.scalar()?;
        let (lp, hs) = (lp_norm(&f, p)?, f.hdot_norm(s));
        Ok(if s >= 0.0 { (lp, hs) } else { (hs, lp) })
    })
}

/// Both sides of `‖f‖_{Ḣ^{s_mid}} ≤ ‖f‖_{Ḣ^{s_lo}}^{1-t} ‖f‖_{Ḣ^{s_hi}}^t`,
/// `t = (s_mid - s_lo)/(s_hi - s_lo)`.
pub fn check_interpolation(f: &ScalarField, s_lo: f64, s_hi: f64, s_mid: f64) -> Result<(f64, f64)> {
    if !(s_lo < s_mid && s_mid < s_hi) {
        return Err(Error::precondition(format!(
            "need s_lo < s_mid < s_hi, got {s_lo}, {s_mid}, {s_hi}"
        )));
    }
    let t = (s_mid - s_lo) / (s_hi - s_lo);
    let lhs = f.hdot_norm(s_mid);
    let rhs = f.hdot_norm(s_lo).powf(1.0 - t) * f.hdot_norm(s_hi).powf(t);
    Ok((lhs, rhs))
}

pub fn audit_interpolation(corpus: &CorpusSpec, s_lo: f64, s_hi: f64, s_mid: f64) -> Result<Audit> {
    let exponents = exps(&[("s_lo", s_lo), ("s_mid", s_mid), ("s_hi", s_hi)]);
    if !(s_lo < s_mid && s_mid < s_hi) {
        return Err(Error::precondition(format!(
            "need s_lo < s_mid < s_hi, got {s_lo}, {s_mid}, {s_hi}"
        )));
    }
    run(corpus, InequalityId::Interpolation, exponents, |pt| {
        check_interpolation(&pt.scalar()?, s_lo, s_hi, s_mid)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&mut []), 0.0);
    }

    #[test]
    fn product_constraints() {
        assert!(product_exponents_admissible(3, 0.0, 0.75, 0.75).is_ok());
        assert!(product_exponents_admissible(3, 0.0, 0.7, 0.75).is_err());
        assert!(product_exponents_admissible(3, 1.5, 1.5, 1.5).is_err());
        assert!(product_exponents_admissible(3, -0.5, 0.5, 0.5).is_ok());
        assert!(product_exponents_admissible(3, 0.5, 0.4, 1.6).is_err());
    }

    #[test]
    fn advection_ranges() {
        assert!(advection_indices(3, AdvectionVariant::Uf3, 1.0, 0.0).is_err());
        assert!(advection_indices(3, AdvectionVariant::Uf3, 0.8, 0.0).is_ok());
        assert!(advection_indices(3, AdvectionVariant::Uf1, 1.0, 1.0).is_err());
        let i = advection_indices(3, AdvectionVariant::Uf1, 1.0, 0.0).unwrap();
        assert_eq!((i.lhs, i.velocity, i.scalar), (-0.5, 0.5, 1.5));
    }

    #[test]
    fn embedding_exponents() {
        assert_eq!(embedding_exponent(3, 0.5).unwrap(), 3.0);
        assert_eq!(embedding_exponent(3, 0.0).unwrap(), 2.0);
        assert_eq!(embedding_exponent(4, 1.0).unwrap(), 4.0);
        assert!(embedding_exponent(3, 1.5).is_err());
    }
}
