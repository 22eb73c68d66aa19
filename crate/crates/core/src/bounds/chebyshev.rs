//! Variance-only bounds: `(ΔX)² ≤ max_x V_x / (2δE0)` and the `R⁻²` tail.

use super::{check_gap, BoundError, HoppingDecay};
use crate::lattice::ModelSpec;

/// `V_x = 2 Σ_x' V(|x − x'|)·(x − x')²` on a chain of `sites` supersites.
pub fn chebyshev_weights(decay: &impl HoppingDecay, sites: usize) -> Vec<f64> {
    // prefix[k] = Σ_{d=1..k} V(d) d²
    let mut prefix = vec![0.0; sites];
    for d in 1..sites {
        prefix[d] = prefix[d - 1] + decay.at_distance(d) * (d * d) as f64;
    }
    (1..=sites).map(|x| 2.0 * (prefix[x - 1] + prefix[sites - x])).collect()
}

/// Same as [`chebyshev_weights`] with the actual block norms in place of the envelope.
pub fn chebyshev_weights_from_norms(spec: &ModelSpec) -> Vec<f64> {
    let mut v = vec![0.0; spec.sites()];
    for (x, x2, block) in spec.hoppings() {
        let d = (x2 - x) as f64;
        let term = 2.0 * block.spectral_norm() * d * d;
        v[x - 1] += term;
        v[x2 - 1] += term;
    }
    v
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Upper bound on `(ΔX)²` from the largest Chebyshev weight.
pub fn variance_bound(max_weight: f64, delta_e0: f64) -> Result<f64, BoundError> {
    check_gap(delta_e0)?;
    Ok(max_weight / (2.0 * delta_e0))
}

/// `min(1, max_x V_x / (2 R² δE0))`.
pub fn chebyshev_tail_bound(decay: &impl HoppingDecay, sites: usize, delta_e0: f64, r: f64) -> Result<f64, BoundError> {
    if !(r > 0.0) {
        return Err(BoundError::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let var = variance_bound(max_of(&chebyshev_weights(decay, sites)), delta_e0)?;
    Ok((var / (r * r)).min(1.0))
}
