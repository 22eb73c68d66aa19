//! Pointwise comparison of measured tails with a theoretical envelope.

use std::io::{self, Write};

use super::{BoundError, TailEnvelope};
use crate::localization::DensityProfile;

/// Default absolute tolerance on probabilities.
pub const DEFAULT_ENVELOPE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeCheck {
    pub kind: &'static str,
    pub r_grid: Vec<f64>,
    pub bound_values: Vec<f64>,
    pub tail_values: Vec<f64>,
    /// Radii where `tail > bound + tolerance`.
    pub violations: Vec<f64>,
    pub tolerance: f64,
}

impl EnvelopeCheck {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Smallest `bound − tail` over the grid (`+∞` for an empty grid).
    pub fn min_margin(&self) -> f64 {
        self.bound_values.iter().zip(&self.tail_values).map(|(b, t)| b - t).fold(f64::INFINITY, f64::min)
    }

    /// Writes `R,tail,bound,violation` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "R,tail,bound,violation")?;
        for ((r, t), b) in self.r_grid.iter().zip(&self.tail_values).zip(&self.bound_values) {
            let violation = u8::from(*t > b + self.tolerance);
            writeln!(out, "{r:.16e},{t:.16e},{b:.16e},{violation}")?;
        }
        Ok(())
    }
}

/// Evaluates tail and envelope at `R = r1, r1 + step, …` up to the largest
/// distance on the lattice. `R = 0` is left out: the tail there is one by
/// definition and no envelope with prefactor below one can cover it.
pub fn verify_envelope(
    profile: &DensityProfile,
    mean: f64,
    bound: &impl TailEnvelope,
    grid_step: f64,
    tolerance: f64,
) -> Result<EnvelopeCheck, BoundError> {
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(BoundError::InvalidParameter(format!("grid step must be positive, got {grid_step}")));
    }
    if !(tolerance >= 0.0) {
        return Err(BoundError::InvalidParameter(format!("tolerance must be nonnegative, got {tolerance}")));
    }
    let r1 = bound.onset();
    let max_r = profile.max_distance(mean);
    let mut check = EnvelopeCheck {
        kind: bound.kind(),
        r_grid: Vec::new(),
        bound_values: Vec::new(),
        tail_values: Vec::new(),
        violations: Vec::new(),
        tolerance,
    };
    let mut k = 0usize;
    loop {
        let r = r1 + k as f64 * grid_step;
        k += 1;
        if r > max_r {
            break;
        }
        if r <= 0.0 {
            continue;
        }
        let tail = profile.tail(mean, r);
        let value = bound.at(r);
        if tail > value + tolerance {
            check.violations.push(r);
        }
        check.r_grid.push(r);
        check.tail_values.push(tail);
        check.bound_values.push(value);
    }
    Ok(check)
}

/// `min(1, Chebyshev, envelope)` where the envelope applies (`r >= r1`).
/// A summary convenience, not a separate bound.
pub fn combined_tail_bound(chebyshev: f64, bound: &impl TailEnvelope, r: f64) -> f64 {
    let mut best = chebyshev.min(1.0);
    if r >= bound.onset() {
        best = best.min(bound.at(r));
    }
    best
}
