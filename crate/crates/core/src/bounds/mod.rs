//! Inequalities linking the spectral gap to ground-state localization.
//!
//! - [`complementary`]: `δE0·(ΔG)² ≤ |⟨H_OD⟩|/2` for an arbitrary weight `g`,
//!   with `⟨H_OD⟩` computed twice (pair sum and double commutator).
//! - [`chebyshev`]: variance bound and the `R⁻²` tail bound.
//! - [`theorems`]: exponential tail envelopes for exponentially decaying and
//!   nearest-neighbor hopping.
//! - [`envelope`]: pointwise comparison of a measured tail with an envelope.
//! - [`offdiag`]: the piecewise bound on the weighted hopping sum used by the
//!   exponential envelope.

pub mod chebyshev;
pub mod complementary;
pub mod envelope;
pub mod offdiag;
pub mod theorems;
pub mod weight;

use thiserror::Error;

use crate::lattice::{HoppingEnvelope, NearestNeighborBound};
use crate::localization::AnalysisError;

pub use chebyshev::{chebyshev_tail_bound, chebyshev_weights, chebyshev_weights_from_norms, variance_bound};
pub use complementary::{g_expectations, ComplementaryReport};
pub use envelope::{combined_tail_bound, verify_envelope, EnvelopeCheck};
pub use offdiag::{verify_offdiagonal_bound, OffDiagonalCheck, Region};
pub use theorems::{
    c1_constant, optimal_s, theorem1_bound, theorem2_bound, BoundReport, TailEnvelope, Theorem1Bound, Theorem2Bound,
    DEFAULT_S, S_GRID,
};
pub use weight::{trapezoid_g, TrapezoidVariant, WeightFunction};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("parameter s must lie in (0, 1), got {0}")]
    InvalidS(f64),
    #[error("spectral gap must be positive, got {0}")]
    NonPositiveGap(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("region width {delta_r} too small for this weight family (need > {min})")]
    RegionTooNarrow { delta_r: f64, min: f64 },
    #[error("weight function does not match the trapezoid for the region (max deviation {0:e})")]
    ShapeMismatch(f64),
    #[error("model violates the declared hopping envelope")]
    EnvelopeViolated,
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Hopping-norm bound as a function of lattice distance.
pub trait HoppingDecay {
    fn at_distance(&self, d: usize) -> f64;
}

impl HoppingDecay for HoppingEnvelope {
    fn at_distance(&self, d: usize) -> f64 {
        self.at(d as f64)
    }
}

impl HoppingDecay for NearestNeighborBound {
    fn at_distance(&self, d: usize) -> f64 {
        if d == 1 {
            self.v0
        } else {
            0.0
        }
    }
}

pub(crate) fn check_s(s: f64) -> Result<(), BoundError> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(BoundError::InvalidS(s))
    }
}

pub(crate) fn check_gap(gap: f64) -> Result<(), BoundError> {
    if gap > 0.0 && gap.is_finite() {
        Ok(())
    } else {
        Err(BoundError::NonPositiveGap(gap))
    }
}
