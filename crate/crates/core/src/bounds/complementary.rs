//! Gap–fluctuation inequality `δE0·(ΔG)² ≤ |⟨H_OD⟩|/2`.

use num_complex::Complex64;

use super::{BoundError, WeightFunction};
use crate::lattice::ModelSpec;
use crate::localization::density;

/// Both sides of the inequality with the ingredients that produced them.
///
/// `⟨H_OD⟩` is recorded with the sign of `−⟨[G,[G,H]]⟩`, which is
/// nonnegative on a ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementaryReport {
    pub mean_g: f64,
    pub mean_g2: f64,
    pub var_g: f64,
    /// Pair sum over stored hopping blocks.
    pub hod_explicit: f64,
    /// `2⟨Gψ|H|Gψ⟩ − 2 Re⟨G²ψ|Hψ⟩` on the assembled matrix.
    pub hod_commutator: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// `max(1, ‖H‖·max g²)`, the reference magnitude for tolerances.
    pub scale: f64,
}

impl ComplementaryReport {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.slack >= -rel_tol * self.scale
    }

    pub fn routes_agree(&self, rel_tol: f64) -> bool {
        (self.hod_explicit - self.hod_commutator).abs() <= rel_tol * self.scale
    }
}

/// `−Σ_{x<x'} 2 [g(x) − g(x')]² Re Σ_ij α*_(x,i) h_ij α_(x',j)`.
pub(crate) fn hod_pair_sum(spec: &ModelSpec, g: &WeightFunction, psi: &[Complex64]) -> f64 {
    let n0 = spec.internal_dim();
    let mut total = 0.0;
    for (x, x2, block) in spec.hoppings() {
        let dg = g.at(x) - g.at(x2);
        if dg == 0.0 {
            continue;
        }
        let a = &psi[(x - 1) * n0..x * n0];
        let b = &psi[(x2 - 1) * n0..x2 * n0];
        let mut amp = Complex64::default();
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                amp += ai.conj() * block.get(i, j) * bj;
            }
        }
        total += 2.0 * dg * dg * amp.re;
    }
    -total
}

/// Evaluates `⟨G⟩`, `⟨G²⟩`, `(ΔG)²`, `⟨H_OD⟩` on `psi` and both sides of
/// the inequality for the given gap.
pub fn g_expectations(
    psi: &[Complex64],
    spec: &ModelSpec,
    g: &WeightFunction,
    delta_e0: f64,
) -> Result<ComplementaryReport, BoundError> {
    if g.sites() != spec.sites() {
        return Err(BoundError::DimensionMismatch { expected: spec.sites(), found: g.sites() });
    }
    let profile = density(psi, spec)?;
    let p = profile.values();
    let mean_g: f64 = p.iter().zip(g.values()).map(|(p, g)| p * g).sum();
    let mean_g2: f64 = p.iter().zip(g.values()).map(|(p, g)| p * g * g).sum();
    let var_g: f64 = p.iter().zip(g.values()).map(|(p, g)| p * (g - mean_g).powi(2)).sum();

    let hod_explicit = hod_pair_sum(spec, g, psi);

    let h = spec.assemble();
    let n0 = spec.internal_dim();
    let weight = |k: usize| g.values()[k / n0];
    let g_psi: Vec<Complex64> = psi.iter().enumerate().map(|(k, z)| z * weight(k)).collect();
    let g2_psi: Vec<Complex64> = g_psi.iter().enumerate().map(|(k, z)| z * weight(k)).collect();
    let h_psi = h.apply(psi);
    let cross: f64 = g2_psi.iter().zip(&h_psi).map(|(a, b)| (a.conj() * b).re).sum();
    let hod_commutator = 2.0 * h.expectation(&g_psi) - 2.0 * cross;

    let lhs = delta_e0 * var_g;
    let rhs = hod_explicit.abs() / 2.0;
    let scale = (h.spectral_scale() * g.max_abs().powi(2)).max(1.0);
    Ok(ComplementaryReport { mean_g, mean_g2, var_g, hod_explicit, hod_commutator, lhs, rhs, slack: rhs - lhs, scale })
}
