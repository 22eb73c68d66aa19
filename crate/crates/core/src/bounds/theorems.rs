//! Exponential tail envelopes `P(|x − ⟨x⟩| ≥ R) ≤ A·exp(−(R − r1)/ξ)`,
//! valid for `R ≥ r1`.
//!
//! The first family needs only an exponential hopping envelope
//! `‖h_xx'‖ ≤ Cv·e^{−μ|x−x'|}`; its decay length is
//!
//! ```text
//! ξ1 = max( (3/2)·sqrt((4e² + 1)·C1 / (e·s·δE0)), 3·ln(2e)/μ ),
//! C1 = 4·Cv·Σ_{x≥0} (x + 1)² e^{−μx},
//! ```
//!
//! with onset `r1 = sqrt((2e + 1)/(1 − s))·ΔX` and prefactor
//! `(2e(2 − s) + 1) / (4(2e + 1))`. The second family requires strictly
//! nearest-neighbor hopping with norms at most `V0` and gives
//! `ξ2 = sqrt(e·V0/(s·δE0)) + 2`, `r1 = sqrt((e + 1)/(1 − s))·ΔX` and
//! prefactor `e(1 − s)/(e + 1)`.

use std::f64::consts::E;

use super::{check_gap, check_s, BoundError};
use crate::lattice::HoppingEnvelope;

/// Default trade-off parameter.
pub const DEFAULT_S: f64 = 0.5;

/// Grid searched by [`optimal_s`].
pub const S_GRID: [f64; 19] =
    [0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95];

/// `C1 = 4Cv(1 + q)/(1 − q)³` with `q = e^{−μ}`.
pub fn c1_constant(envelope: &HoppingEnvelope) -> f64 {
    let q = (-envelope.mu).exp();
    4.0 * envelope.cv * (1.0 + q) / (1.0 - q).powi(3)
}

/// Common view of the two envelope families.
pub trait TailEnvelope {
    fn kind(&self) -> &'static str;
    fn s(&self) -> f64;
    /// Onset radius `r1`.
    fn onset(&self) -> f64;
    fn decay_length(&self) -> f64;
    fn prefactor(&self) -> f64;
    /// `C1` for the exponential family, `V0` for the nearest-neighbor family.
    fn hopping_constant(&self) -> f64;

    /// Envelope value at `r`; meaningful for `r >= onset()`.
    fn at(&self, r: f64) -> f64 {
        self.prefactor() * (-(r - self.onset()) / self.decay_length()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Bound {
    pub s: f64,
    pub c1: f64,
    pub r1: f64,
    pub xi1: f64,
    pub prefactor: f64,
    pub mu: f64,
}

impl Theorem1Bound {
    /// The gap-controlled branch of `ξ1`.
    pub fn gap_branch(&self, delta_e0: f64) -> f64 {
        1.5 * ((4.0 * E * E + 1.0) * self.c1 / (E * self.s * delta_e0)).sqrt()
    }

    /// The hopping-range floor `3 ln(2e)/μ`.
    pub fn range_floor(&self) -> f64 {
        3.0 * (2.0 * E).ln() / self.mu
    }
}

impl TailEnvelope for Theorem1Bound {
    fn kind(&self) -> &'static str {
        "theorem1"
    }
    fn s(&self) -> f64 {
        self.s
    }
    fn onset(&self) -> f64 {
        self.r1
    }
    fn decay_length(&self) -> f64 {
        self.xi1
    }
    fn prefactor(&self) -> f64 {
        self.prefactor
    }
    fn hopping_constant(&self) -> f64 {
        self.c1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Bound {
    pub s: f64,
    pub v0: f64,
    pub r1: f64,
    pub xi2: f64,
    pub prefactor: f64,
}

impl TailEnvelope for Theorem2Bound {
    fn kind(&self) -> &'static str {
        "theorem2"
    }
    fn s(&self) -> f64 {
        self.s
    }
    fn onset(&self) -> f64 {
        self.r1
    }
    fn decay_length(&self) -> f64 {
        self.xi2
    }
    fn prefactor(&self) -> f64 {
        self.prefactor
    }
    fn hopping_constant(&self) -> f64 {
        self.v0
    }
}

fn check_delta_x(delta_x: f64) -> Result<(), BoundError> {
    if delta_x >= 0.0 && delta_x.is_finite() {
        Ok(())
    } else {
        Err(BoundError::InvalidParameter(format!("ΔX must be nonnegative, got {delta_x}")))
    }
}

/// Envelope for exponentially decaying hopping.
pub fn theorem1_bound(
    envelope: &HoppingEnvelope,
    delta_e0: f64,
    s: f64,
    delta_x: f64,
) -> Result<Theorem1Bound, BoundError> {
    check_s(s)?;
    check_gap(delta_e0)?;
    check_delta_x(delta_x)?;
    let c1 = c1_constant(envelope);
    let mut bound = Theorem1Bound {
        s,
        c1,
        r1: ((2.0 * E + 1.0) / (1.0 - s)).sqrt() * delta_x,
        xi1: 0.0,
        prefactor: (2.0 * E * (2.0 - s) + 1.0) / (4.0 * (2.0 * E + 1.0)),
        mu: envelope.mu,
    };
    bound.xi1 = bound.gap_branch(delta_e0).max(bound.range_floor());
    Ok(bound)
}

/// Envelope for strictly nearest-neighbor hopping with norms at most `v0`.
pub fn theorem2_bound(v0: f64, delta_e0: f64, s: f64, delta_x: f64) -> Result<Theorem2Bound, BoundError> {
    check_s(s)?;
    check_gap(delta_e0)?;
    check_delta_x(delta_x)?;
    if !(v0 > 0.0 && v0.is_finite()) {
        return Err(BoundError::InvalidParameter(format!("V0 must be positive, got {v0}")));
    }
    Ok(Theorem2Bound {
        s,
        v0,
        r1: ((E + 1.0) / (1.0 - s)).sqrt() * delta_x,
        xi2: (E * v0 / (s * delta_e0)).sqrt() + 2.0,
        prefactor: E * (1.0 - s) / (E + 1.0),
    })
}

/// The `s` from [`S_GRID`] giving the smallest envelope at radius `r`.
/// Values of `s` whose onset exceeds `r` are skipped; `None` if none apply.
pub fn optimal_s<B: TailEnvelope>(
    r: f64,
    make: impl Fn(f64) -> Result<B, BoundError>,
) -> Result<Option<(f64, f64)>, BoundError> {
    let mut best: Option<(f64, f64)> = None;
    for s in S_GRID {
        let bound = make(s)?;
        if r < bound.onset() {
            continue;
        }
        let v = bound.at(r);
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((s, v));
        }
    }
    Ok(best)
}

/// Row of the bound report CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: &'static str,
    pub s: f64,
    pub r1: f64,
    pub xi: f64,
    pub prefactor: f64,
    pub c1_or_v0: f64,
    pub delta_e0: f64,
    pub delta_x: f64,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "kind,s,r1,xi,prefactor,C1_or_V0,deltaE0,deltaX";

    pub fn new(bound: &impl TailEnvelope, delta_e0: f64, delta_x: f64) -> Self {
        Self {
            kind: bound.kind(),
            s: bound.s(),
            r1: bound.onset(),
            xi: bound.decay_length(),
            prefactor: bound.prefactor(),
            c1_or_v0: bound.hopping_constant(),
            delta_e0,
            delta_x,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.kind, self.s, self.r1, self.xi, self.prefactor, self.c1_or_v0, self.delta_e0, self.delta_x
        )
    }
}
