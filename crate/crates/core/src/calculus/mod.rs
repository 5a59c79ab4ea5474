//! Ratio audits of the calculus inequalities: commutator, product law,
//! advection estimates, embeddings and interpolation.
//!
//! Constants are measured, never asserted: each audit reports the largest and
//! median `LHS / RHS` over a seeded corpus, per resolution.

mod audit;
mod commutator;
mod corpus;
mod request;

pub use audit::{
    advection_indices, audit_advection, audit_embedding, audit_interpolation, audit_kpv,
    audit_product, check_interpolation, embedding_exponent, product_exponents_admissible,
    AdvectionIndices, AdvectionVariant, Audit, AuditSample, InequalityId, RatioReport,
    ResolutionMax, RHS_FLOOR,
};
pub use commutator::commutator;
pub use request::{standard_audits, AuditRequest};
pub use corpus::{standard_seeds, Band, CorpusSpec, SamplePoint, SECOND_STREAM};
pub(crate) use audit::median;
