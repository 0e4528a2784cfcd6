//! Certified arithmetic: dyadic intervals, refinable scalars, θ specifications.

pub mod dyadic;
pub mod fast;
pub mod interval;
pub mod poly;
pub mod scalar;
pub mod theta;

pub use dyadic::{Dyadic, Round};
pub use fast::F64Iv;
pub use interval::{Interval, IntervalError};
pub use poly::RatPoly;
pub use scalar::{certified_compare, compare_ext, CertifiedScalar, Comparison, ExtScalar, ScalarError};
pub use theta::{Component, Schedule, SpecError, ThetaSpec};

/// Certified enclosures of every component of θ, each of relative width at most
/// `2^(1 - precision_bits)`.
pub fn evaluate(spec: &ThetaSpec, precision_bits: u32) -> Result<Vec<CertifiedScalar>, ScalarError> {
    let p = precision_bits.max(8);
    spec.components().iter().map(|c| CertifiedScalar::theta(c).refine(p)).collect()
}

/// Refinement ceiling used when certifying a comparison at working precision
/// `precision_bits`.
pub fn max_bits(precision_bits: u32) -> u32 {
    precision_bits.saturating_mul(8).max(1024)
}
