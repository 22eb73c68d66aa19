//! Piecewise bound on the weighted hopping sum for trapezoid weights.
//!
//! For `g` from [`trapezoid_g`] with the exponential variant and
//! `a = r_inner + δr/3`, `b = r_inner + 2δr/3`, the per-site weights
//! `V_{g,x} = 2 Σ_x' [g(x) − g(x')]² V(|x − x'|)` satisfy
//!
//! ```text
//! V_{g,x} ≤ C1·e^{−μ(a − d)}   for d ≤ a
//!         ≤ C1                 for a ≤ d ≤ b
//!         ≤ C1·e^{−μ(d − b)}   for d ≥ b,      d = |x − center|,
//! ```
//!
//! and `|⟨H_OD⟩| ≤ Σ_x V_{g,x} p_x`. The check evaluates all three levels.

use num_complex::Complex64;

use super::complementary::hod_pair_sum;
use super::theorems::c1_constant;
use super::{trapezoid_g, BoundError, HoppingDecay, TrapezoidVariant, WeightFunction};
use crate::lattice::{HoppingEnvelope, ModelSpec};
use crate::localization::density;

const SHAPE_TOL: f64 = 1e-12;
/// Relative tolerance of the final comparison.
pub const OFFDIAG_REL_TOL: f64 = 1e-9;

/// Radial region `r_inner ≤ |x − center| < r_inner + δr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub center: f64,
    pub r_inner: f64,
    pub delta_r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffDiagonalCheck {
    /// `|⟨H_OD⟩|`.
    pub hod_abs: f64,
    /// `Σ_x V_{g,x} p_x` with the envelope in place of the block norms.
    pub weighted_sum: f64,
    /// `Σ_x p_x` times the piecewise bound.
    pub piecewise_sum: f64,
    /// Sites where `V_{g,x}` exceeds its piecewise bound.
    pub pointwise_violations: Vec<usize>,
    pub c1: f64,
    pub scale: f64,
}

impl OffDiagonalCheck {
    pub fn holds(&self) -> bool {
        self.hod_abs <= self.piecewise_sum + OFFDIAG_REL_TOL * self.scale
    }

    /// All three levels ordered and no pointwise violation.
    pub fn chain_holds(&self) -> bool {
        self.holds()
            && self.hod_abs <= self.weighted_sum + OFFDIAG_REL_TOL * self.scale
            && self.pointwise_violations.is_empty()
    }
}

/// Piecewise bound at radial distance `d`.
pub fn piecewise_weight_bound(c1: f64, mu: f64, region: &Region, d: f64) -> f64 {
    let a = region.r_inner + region.delta_r / 3.0;
    let b = region.r_inner + 2.0 * region.delta_r / 3.0;
    if d <= a {
        c1 * (-mu * (a - d)).exp()
    } else if d <= b {
        c1
    } else {
        c1 * (-mu * (d - b)).exp()
    }
}

/// `V_{g,x}` for every site.
pub fn site_weights(g: &WeightFunction, decay: &impl HoppingDecay) -> Vec<f64> {
    let n = g.sites();
    (1..=n)
        .map(|x| {
            let gx = g.at(x);
            2.0 * (1..=n)
                .filter(|&y| y != x)
                .map(|y| (gx - g.at(y)).powi(2) * decay.at_distance(x.abs_diff(y)))
                .sum::<f64>()
        })
        .collect()
}

/// Checks `|⟨H_OD⟩| ≤ Σ_x bound(x)·p_x` for a trapezoid weight on `region`.
pub fn verify_offdiagonal_bound(
    spec: &ModelSpec,
    envelope: &HoppingEnvelope,
    g: &WeightFunction,
    psi: &[Complex64],
    region: &Region,
) -> Result<OffDiagonalCheck, BoundError> {
    if g.sites() != spec.sites() {
        return Err(BoundError::DimensionMismatch { expected: spec.sites(), found: g.sites() });
    }
    let expected =
        trapezoid_g(spec.sites(), region.center, region.r_inner, region.delta_r, TrapezoidVariant::Exponential)?;
    let deviation = g.values().iter().zip(expected.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if deviation > SHAPE_TOL {
        return Err(BoundError::ShapeMismatch(deviation));
    }
    if !envelope.admits(spec) {
        return Err(BoundError::EnvelopeViolated);
    }
    let profile = density(psi, spec)?;
    let p = profile.values();
    let hod_abs = hod_pair_sum(spec, g, psi).abs();
    let c1 = c1_constant(envelope);
    let weights = site_weights(g, envelope);
    let mut weighted_sum = 0.0;
    let mut piecewise_sum = 0.0;
    let mut pointwise_violations = Vec::new();
    for (k, (&w, &px)) in weights.iter().zip(p).enumerate() {
        let x = k + 1;
        let cap = piecewise_weight_bound(c1, envelope.mu, region, (x as f64 - region.center).abs());
        if w > cap * (1.0 + 1e-12) + 1e-12 {
            pointwise_violations.push(x);
        }
        weighted_sum += w * px;
        piecewise_sum += cap * px;
    }
    Ok(OffDiagonalCheck {
        hod_abs,
        weighted_sum,
        piecewise_sum,
        pointwise_violations,
        c1,
        scale: piecewise_sum.max(1.0),
    })
}
