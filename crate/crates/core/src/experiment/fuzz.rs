//! Randomized invariant checks on generated models.
//!
//! Each trial draws a model from the chosen family with [`trial_rng`],
//! solves it and checks:
//!
//! - Hermiticity of the assembled matrix and eigenpair residuals
//! - the gap–fluctuation inequality and agreement of both `⟨H_OD⟩` routes,
//!   for the position weight and a random weight
//! - the variance bound and the Chebyshev tail bound
//! - the exponential tail envelopes that apply to the family
//! - for the envelope family, the piecewise off-diagonal bound on a random region
//!
//! Draws with a degenerate ground state are skipped and counted.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use super::random::{random_envelope_spec, random_nearest_neighbor_spec, random_weight, trial_rng};
use crate::bounds::envelope::DEFAULT_ENVELOPE_TOL;
use crate::bounds::{
    chebyshev_tail_bound, chebyshev_weights, chebyshev_weights_from_norms, g_expectations, theorem1_bound,
    theorem2_bound, trapezoid_g, variance_bound, verify_envelope, verify_offdiagonal_bound, EnvelopeCheck,
    HoppingDecay, Region, TrapezoidVariant, WeightFunction,
};
use crate::eigen::{lowest_two, EigenError, DEFAULT_DEGENERACY_TOL, DEFAULT_RESIDUAL_TOL};
use crate::lattice::{HoppingEnvelope, ModelSpec, NearestNeighborBound};
use crate::localization::density;

/// Relative tolerance for the inequality checks.
pub const FUZZ_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuzzFamily {
    /// Hopping of any range up to `max_range`, norms below `Cv·e^{−μd}`.
    Envelope,
    /// Strictly nearest-neighbor hopping with norms below `V0`.
    NearestNeighbor,
}

impl FuzzFamily {
    pub fn name(self) -> &'static str {
        match self {
            FuzzFamily::Envelope => "envelope",
            FuzzFamily::NearestNeighbor => "nn",
        }
    }
}

impl fmt::Display for FuzzFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FuzzFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "envelope" => Ok(FuzzFamily::Envelope),
            "nn" | "nearest-neighbor" => Ok(FuzzFamily::NearestNeighbor),
            other => Err(format!("unknown family `{other}` (expected `envelope` or `nn`)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub trials: usize,
    /// Inclusive range of supersite counts.
    pub size_range: (usize, usize),
    /// Inclusive range of internal dimensions.
    pub n0_range: (usize, usize),
    pub family: FuzzFamily,
    /// Declared envelope for the envelope family.
    pub cv: f64,
    pub mu: f64,
    /// Declared nearest-neighbor bound.
    pub v0: f64,
    /// Longest hopping distance drawn in the envelope family.
    pub max_range: usize,
    /// Generated norms reach up to `hopping_scale` times the declared bound.
    /// Values above one produce inputs that break the declaration.
    pub hopping_scale: f64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 500,
            size_range: (4, 40),
            n0_range: (1, 3),
            family: FuzzFamily::NearestNeighbor,
            cv: 1.0,
            mu: 1.0,
            v0: 1.0,
            max_range: 4,
            hopping_scale: 1.0,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<(), FuzzError> {
        let bad = |m: String| Err(FuzzError::Config(m));
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        let (lo, hi) = self.size_range;
        if lo < 2 || lo > hi {
            return bad(format!("size range must satisfy 2 <= min <= max, got ({lo}, {hi})"));
        }
        let (lo, hi) = self.n0_range;
        if lo < 1 || lo > hi {
            return bad(format!("internal dimension range must satisfy 1 <= min <= max, got ({lo}, {hi})"));
        }
        for (name, v) in [("cv", self.cv), ("mu", self.mu), ("v0", self.v0), ("hopping_scale", self.hopping_scale)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.max_range == 0 {
            return bad("max_range must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FuzzError {
    #[error("invalid fuzz configuration: {0}")]
    Config(String),
    #[error("trial {trial} (seed {seed}) breaks the declared hopping bound: {detail}")]
    Precondition { seed: u64, trial: usize, detail: String },
    #[error(
        "invariant `{check}` failed on trial {trial} (seed {seed}): {detail}; \
         reproduce with `gapbound fuzz --seed {seed} --trials {} --family {family}`",
        trial + 1
    )]
    Invariant { seed: u64, trial: usize, family: FuzzFamily, check: &'static str, detail: String },
}

/// Worst observed margins, each relative to the scale of its check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margins {
    pub complementary: f64,
    pub variance: f64,
    pub envelope: f64,
    pub offdiagonal: f64,
}

impl Margins {
    fn unbounded() -> Self {
        Self {
            complementary: f64::INFINITY,
            variance: f64::INFINITY,
            envelope: f64::INFINITY,
            offdiagonal: f64::INFINITY,
        }
    }

    fn merge(self, o: Self) -> Self {
        Self {
            complementary: self.complementary.min(o.complementary),
            variance: self.variance.min(o.variance),
            envelope: self.envelope.min(o.envelope),
            offdiagonal: self.offdiagonal.min(o.offdiagonal),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzReport {
    pub seed: u64,
    pub family: FuzzFamily,
    pub trials: usize,
    pub passed: usize,
    pub skipped_degenerate: usize,
    pub margins: Margins,
}

impl FuzzReport {
    pub fn failures(&self) -> usize {
        self.trials - self.passed - self.skipped_degenerate
    }

    /// Plain-text summary; identical runs render identical bytes.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let m = &self.margins;
        let _ = writeln!(s, "family: {}", self.family);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "trials: {}", self.trials);
        let _ = writeln!(s, "passed: {}", self.passed);
        let _ = writeln!(s, "skipped (degenerate ground state): {}", self.skipped_degenerate);
        let _ = writeln!(s, "failures: {}", self.failures());
        let _ = writeln!(s, "min relative margin, complementary: {:.6e}", m.complementary);
        let _ = writeln!(s, "min relative margin, variance: {:.6e}", m.variance);
        let _ = writeln!(s, "min margin, tail envelope: {:.6e}", m.envelope);
        let _ = writeln!(s, "min relative margin, off-diagonal: {:.6e}", m.offdiagonal);
        s
    }
}

enum Outcome {
    Passed(Margins),
    Degenerate,
}

/// Draws one model from the configured family without checking it.
pub fn trial_model(config: &FuzzConfig, rng: &mut impl Rng) -> ModelSpec {
    let sites = rng.gen_range(config.size_range.0..=config.size_range.1);
    let n0 = rng.gen_range(config.n0_range.0..=config.n0_range.1);
    match config.family {
        FuzzFamily::Envelope => {
            let env = HoppingEnvelope { cv: config.cv, mu: config.mu };
            random_envelope_spec(rng, sites, n0, &env, config.max_range, config.hopping_scale)
        }
        FuzzFamily::NearestNeighbor => random_nearest_neighbor_spec(rng, sites, n0, config.v0, config.hopping_scale),
    }
}

/// Runs all trials (concurrently, on the current rayon pool) and reports
/// the first failure in trial order.
pub fn run_fuzz(config: &FuzzConfig) -> Result<FuzzReport, FuzzError> {
    config.validate()?;
    let outcomes: Vec<Result<Outcome, FuzzError>> =
        (0..config.trials).into_par_iter().map(|t| run_trial(config, t)).collect();
    let mut report = FuzzReport {
        seed: config.seed,
        family: config.family,
        trials: config.trials,
        passed: 0,
        skipped_degenerate: 0,
        margins: Margins::unbounded(),
    };
    for outcome in outcomes {
        match outcome? {
            Outcome::Passed(m) => {
                report.passed += 1;
                report.margins = report.margins.merge(m);
            }
            Outcome::Degenerate => report.skipped_degenerate += 1,
        }
    }
    Ok(report)
}

fn run_trial(config: &FuzzConfig, trial: usize) -> Result<Outcome, FuzzError> {
    let mut rng = trial_rng(config.seed, trial as u64);
    let spec = trial_model(config, &mut rng);
    let fail = |check: &'static str, detail: String| FuzzError::Invariant {
        seed: config.seed,
        trial,
        family: config.family,
        check,
        detail,
    };

    let envelope = HoppingEnvelope { cv: config.cv, mu: config.mu };
    let nn = NearestNeighborBound { v0: config.v0 };
    match config.family {
        FuzzFamily::Envelope if !envelope.admits(&spec) => {
            return Err(FuzzError::Precondition {
                seed: config.seed,
                trial,
                detail: format!("a hopping block exceeds Cv·e^(−μd) with Cv={}, μ={}", config.cv, config.mu),
            });
        }
        FuzzFamily::NearestNeighbor => {
            let actual = spec.check_nearest_neighbor().map_err(|e| fail("nearest-neighbor", e.to_string()))?;
            if actual.v0 > config.v0 * (1.0 + 1e-12) {
                return Err(FuzzError::Precondition {
                    seed: config.seed,
                    trial,
                    detail: format!("largest block norm {} exceeds V0={}", actual.v0, config.v0),
                });
            }
        }
        _ => {}
    }

    let h = spec.assemble();
    let scale = h.spectral_scale().max(1.0);
    let defect = h.hermiticity_defect();
    if defect > 1e-12 * scale {
        return Err(fail("hermiticity", format!("defect {defect:e}")));
    }
    let r = match lowest_two(&h, DEFAULT_RESIDUAL_TOL, DEFAULT_DEGENERACY_TOL) {
        Ok(r) => r,
        Err(EigenError::DegenerateGroundState { .. }) => return Ok(Outcome::Degenerate),
        Err(e) => return Err(fail("eigensolver", e.to_string())),
    };
    let limit = DEFAULT_RESIDUAL_TOL * scale;
    if r.residual0 > limit || r.residual1 > limit || !(r.gap > 0.0) {
        return Err(fail("eigenpairs", format!("residuals {:e}, {:e}; gap {:e}", r.residual0, r.residual1, r.gap)));
    }

    let mut margins = Margins::unbounded();
    let sites = spec.sites();

    let amplitude = rng.gen_range(0.1..10.0);
    for g in [WeightFunction::position(sites), random_weight(&mut rng, sites, amplitude)] {
        let rep = g_expectations(&r.psi0, &spec, &g, r.gap).map_err(|e| fail("complementary", e.to_string()))?;
        if !rep.holds(FUZZ_REL_TOL) {
            return Err(fail(
                "complementary",
                format!("lhs {:e} > rhs {:e} (scale {:e})", rep.lhs, rep.rhs, rep.scale),
            ));
        }
        if !rep.routes_agree(FUZZ_REL_TOL) {
            return Err(fail(
                "hod-routes",
                format!("explicit {:e} vs commutator {:e}", rep.hod_explicit, rep.hod_commutator),
            ));
        }
        margins.complementary = margins.complementary.min(rep.slack / rep.scale);
    }

    let profile = density(&r.psi0, &spec).map_err(|e| fail("density", e.to_string()))?;
    let stats = profile.position_stats();
    let delta_x = stats.std_dev();

    let declared: &dyn Fn(usize) -> Vec<f64> = match config.family {
        FuzzFamily::Envelope => &|n| chebyshev_weights(&envelope, n),
        FuzzFamily::NearestNeighbor => &|n| chebyshev_weights(&nn, n),
    };
    for weights in [declared(sites), chebyshev_weights_from_norms(&spec)] {
        let max_w = weights.iter().copied().fold(0.0, f64::max);
        let bound = variance_bound(max_w, r.gap).map_err(|e| fail("variance", e.to_string()))?;
        if stats.variance > bound + FUZZ_REL_TOL * bound.max(1.0) {
            return Err(fail("variance", format!("(ΔX)² = {:e} exceeds {bound:e}", stats.variance)));
        }
        margins.variance = margins.variance.min((bound - stats.variance) / bound.max(1.0));
    }

    let max_r = profile.max_distance(stats.mean);
    for k in 1..=4 {
        let radius = max_r * k as f64 / 4.0;
        if radius <= 0.0 {
            continue;
        }
        let bound = match config.family {
            FuzzFamily::Envelope => tail_bound(&envelope, sites, r.gap, radius),
            FuzzFamily::NearestNeighbor => tail_bound(&nn, sites, r.gap, radius),
        }
        .map_err(|e| fail("chebyshev-tail", e))?;
        let tail = profile.tail(stats.mean, radius);
        if tail > bound + DEFAULT_ENVELOPE_TOL {
            return Err(fail("chebyshev-tail", format!("tail {tail:e} at R={radius} exceeds {bound:e}")));
        }
    }

    let s = rng.gen_range(0.05..0.95);
    let mut checks: Vec<EnvelopeCheck> = Vec::new();
    let mut push = |c: Result<EnvelopeCheck, crate::bounds::BoundError>| -> Result<(), FuzzError> {
        checks.push(c.map_err(|e| fail("tail-envelope", e.to_string()))?);
        Ok(())
    };
    match config.family {
        FuzzFamily::Envelope => {
            let b = theorem1_bound(&envelope, r.gap, s, delta_x).map_err(|e| fail("tail-envelope", e.to_string()))?;
            push(verify_envelope(&profile, stats.mean, &b, 0.5, DEFAULT_ENVELOPE_TOL))?;
        }
        FuzzFamily::NearestNeighbor => {
            let b = theorem2_bound(config.v0, r.gap, s, delta_x).map_err(|e| fail("tail-envelope", e.to_string()))?;
            push(verify_envelope(&profile, stats.mean, &b, 0.5, DEFAULT_ENVELOPE_TOL))?;
            if let Ok(fitted) = spec.fit_envelope(config.mu) {
                let b = theorem1_bound(&fitted, r.gap, s, delta_x).map_err(|e| fail("tail-envelope", e.to_string()))?;
                push(verify_envelope(&profile, stats.mean, &b, 0.5, DEFAULT_ENVELOPE_TOL))?;
            }
        }
    }
    for check in &checks {
        if !check.passed() {
            return Err(fail(
                "tail-envelope",
                format!("{} envelope exceeded at R = {:?}", check.kind, check.violations),
            ));
        }
        margins.envelope = margins.envelope.min(check.min_margin());
    }

    if config.family == FuzzFamily::Envelope {
        let half = sites as f64 / 2.0;
        let region = Region {
            center: stats.mean,
            r_inner: rng.gen_range(0.0..half),
            delta_r: 3.0 + rng.gen_range(1e-6..half + 3.0),
        };
        let g = trapezoid_g(sites, region.center, region.r_inner, region.delta_r, TrapezoidVariant::Exponential)
            .map_err(|e| fail("off-diagonal", e.to_string()))?;
        let check = verify_offdiagonal_bound(&spec, &envelope, &g, &r.psi0, &region)
            .map_err(|e| fail("off-diagonal", e.to_string()))?;
        if !check.chain_holds() {
            return Err(fail("off-diagonal", format!("{check:?}")));
        }
        margins.offdiagonal = (check.piecewise_sum - check.hod_abs) / check.scale;
    }

    Ok(Outcome::Passed(margins))
}

fn tail_bound(decay: &impl HoppingDecay, sites: usize, gap: f64, r: f64) -> Result<f64, String> {
    chebyshev_tail_bound(decay, sites, gap, r).map_err(|e| e.to_string())
}
