//! Serializable audit requests, so that a batch of audits can be described in
//! a configuration file.

use serde::{Deserialize, Serialize};

use super::audit::{
    audit_advection, audit_embedding, audit_interpolation, audit_kpv, audit_product,
    AdvectionVariant, Audit,
};
use super::corpus::CorpusSpec;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AuditRequest {
    Kpv { s: f64, s1: f64, s2: f64, p: f64, q: f64, r: f64 },
    Product { s: f64, s1: f64, s2: f64 },
    Advection { variant: AdvectionVariant, alpha: f64, epsilon: f64 },
    Embedding { s: f64 },
    Interpolation { s_lo: f64, s_mid: f64, s_hi: f64 },
}

impl AuditRequest {
    pub fn run(&self, corpus: &CorpusSpec) -> Result<Audit> {
        match *self {
            AuditRequest::Kpv { s, s1, s2, p, q, r } => audit_kpv(corpus, s, s1, s2, p, q, r),
            AuditRequest::Product { s, s1, s2 } => audit_product(corpus, s, s1, s2),
            AuditRequest::Advection {
                variant,
                alpha,
                epsilon,
            } => audit_advection(corpus, variant, alpha, epsilon),
            AuditRequest::Embedding { s } => audit_embedding(corpus, s),
            AuditRequest::Interpolation { s_lo, s_mid, s_hi } => {
                audit_interpolation(corpus, s_lo, s_hi, s_mid)
            }
        }
    }
}

/// The standard battery at `n = 3`: KPV, the product law on both sides of
/// `s = 0` with integer and non-integer `s`, UF1 to UF3, embeddings and
/// interpolation.
pub fn standard_audits() -> Vec<AuditRequest> {
    use AuditRequest::*;
    vec![
        Kpv { s: 0.5, s1: 0.5, s2: 0.5, p: 2.0, q: 4.0, r: 4.0 },
        Product { s: -0.5, s1: 0.5, s2: 0.5 },
        Product { s: 0.0, s1: 0.75, s2: 0.75 },
        Product { s: 0.5, s1: 1.0, s2: 1.0 },
        Product { s: 1.0, s1: 1.25, s2: 1.25 },
        Product { s: 1.25, s1: 1.375, s2: 1.375 },
        Advection { variant: AdvectionVariant::Uf1, alpha: 1.0, epsilon: 0.0 },
        Advection { variant: AdvectionVariant::Uf2, alpha: 1.0, epsilon: 0.25 },
        Advection { variant: AdvectionVariant::Uf3, alpha: 0.8, epsilon: 0.2 },
        Embedding { s: -0.5 },
        Embedding { s: 0.5 },
        Embedding { s: 1.0 },
        Interpolation { s_lo: 0.0, s_mid: 0.5, s_hi: 2.0 },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn requests_round_trip_and_reject_unknown_fields() {
        for r in standard_audits() {
            let text = serde_json::to_string(&r).unwrap();
            assert_eq!(serde_json::from_str::<AuditRequest>(&text).unwrap(), r);
        }
        let bad = r#"{"kind": "embedding", "s": 0.5, "t": 1}"#;
        assert!(serde_json::from_str::<AuditRequest>(bad).is_err());
    }
}
