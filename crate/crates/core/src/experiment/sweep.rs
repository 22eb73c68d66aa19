//! Impurity-chain sweep over the defect strength `h0`.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use rayon::prelude::*;

use super::ExperimentError;
use crate::bounds::envelope::DEFAULT_ENVELOPE_TOL;
use crate::bounds::{theorem1_bound, theorem2_bound, verify_envelope, DEFAULT_S};
use crate::eigen::{lowest_two, DEFAULT_DEGENERACY_TOL, DEFAULT_RESIDUAL_TOL};
use crate::lattice::{impurity_center, impurity_model, HoppingEnvelope};
use crate::localization::{density, fit_localization_length, DEFAULT_BOUNDARY_MARGIN, DEFAULT_FIT_FLOOR};

pub const SWEEP_CSV_HEADER: &str = "h0,E0,E1,gap,deltaX,xi_fit,xi1,xi2,ratio1,ratio2,fit_r_squared";

/// `points` values `h0 = −10^t` with `t` evenly spaced between
/// `log10|h0_min|` and `log10|h0_max|`. Both ends must be negative.
pub fn log_spaced_grid(h0_min: f64, h0_max: f64, points: usize) -> Result<Vec<f64>, ExperimentError> {
    if !(h0_min < 0.0 && h0_max < 0.0 && h0_min.is_finite() && h0_max.is_finite()) {
        return Err(ExperimentError::Config(format!("h0 range must be negative, got [{h0_min}, {h0_max}]")));
    }
    if h0_min > h0_max {
        return Err(ExperimentError::Config(format!("h0_min {h0_min} exceeds h0_max {h0_max}")));
    }
    if points == 0 {
        return Err(ExperimentError::Config("h0 grid needs at least one point".into()));
    }
    let (a, b) = ((-h0_min).log10(), (-h0_max).log10());
    if points == 1 {
        return Ok(vec![h0_min]);
    }
    let step = (b - a) / (points - 1) as f64;
    Ok((0..points)
        .map(|k| {
            if k == 0 {
                h0_min
            } else if k == points - 1 {
                h0_max
            } else {
                -(10f64.powf(a + step * k as f64))
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Chain parameter; the model has `l + 1` sites.
    pub l: usize,
    pub h0_grid: Vec<f64>,
    pub s: f64,
    pub mu: f64,
    /// Envelope prefactor for the first theorem; `None` fits it to each model.
    pub cv: Option<f64>,
    /// Nearest-neighbor bound for the second theorem; `None` reads it off the model.
    pub v0: Option<f64>,
    pub grid_step: f64,
    pub tolerance: f64,
    pub output_path: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            l: 500,
            h0_grid: log_spaced_grid(-1.0, -0.01, 100).expect("valid default grid"),
            s: DEFAULT_S,
            mu: 1.0,
            cv: Some(1.0),
            v0: Some(1.0),
            grid_step: 0.5,
            tolerance: DEFAULT_ENVELOPE_TOL,
            output_path: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.l < 2 || !self.l.is_multiple_of(2) {
            return bad(format!("L must be even and at least 2, got {}", self.l));
        }
        if self.h0_grid.is_empty() {
            return bad("h0 grid is empty".into());
        }
        if let Some(h) = self.h0_grid.iter().find(|h| !(**h < 0.0 && h.is_finite())) {
            return bad(format!("h0 values must be negative, got {h}"));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            return bad(format!("s must lie in (0, 1), got {}", self.s));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        for (name, v) in [("cv", self.cv), ("v0", self.v0)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        if !(self.grid_step > 0.0 && self.grid_step.is_finite()) {
            return bad(format!("grid step must be positive, got {}", self.grid_step));
        }
        if !(self.tolerance >= 0.0) {
            return bad(format!("tolerance must be nonnegative, got {}", self.tolerance));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub h0: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub delta_x: f64,
    /// `NaN` when the profile admits no decay fit.
    pub xi_fit: f64,
    pub xi1: f64,
    pub xi2: f64,
    /// `√2·ξ1/ΔX`.
    pub ratio1: f64,
    /// `√2·ξ2/ΔX`.
    pub ratio2: f64,
    pub fit_r_squared: f64,
    pub violations1: usize,
    pub violations2: usize,
}

impl SweepRow {
    pub fn csv_row(&self) -> String {
        [
            self.h0,
            self.e0,
            self.e1,
            self.gap,
            self.delta_x,
            self.xi_fit,
            self.xi1,
            self.xi2,
            self.ratio1,
            self.ratio2,
            self.fit_r_squared,
        ]
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
    }
}

/// Evaluates one grid point.
pub fn sweep_point(config: &SweepConfig, h0: f64) -> Result<SweepRow, ExperimentError> {
    let at = |reason: String| ExperimentError::SweepPoint { h0, reason };
    let spec = impurity_model(config.l, h0).map_err(|e| at(e.to_string()))?;
    let spectrum =
        lowest_two(&spec.assemble(), DEFAULT_RESIDUAL_TOL, DEFAULT_DEGENERACY_TOL).map_err(|e| at(e.to_string()))?;
    let profile = density(&spectrum.psi0, &spec).map_err(|e| at(e.to_string()))?;
    let stats = profile.position_stats();
    let delta_x = stats.std_dev();
    let center = impurity_center(config.l) as f64;
    let (xi_fit, fit_r_squared) =
        match fit_localization_length(&profile, center, DEFAULT_FIT_FLOOR, DEFAULT_BOUNDARY_MARGIN) {
            Ok(fit) => (fit.xi_fit, fit.r_squared),
            Err(_) => (f64::NAN, f64::NAN),
        };

    let envelope = match config.cv {
        Some(cv) => HoppingEnvelope::new(cv, config.mu),
        None => spec.fit_envelope(config.mu),
    }
    .map_err(|e| at(e.to_string()))?;
    let v0 = match config.v0 {
        Some(v0) => v0,
        None => spec.check_nearest_neighbor().map_err(|e| at(e.to_string()))?.v0,
    };
    let b1 = theorem1_bound(&envelope, spectrum.gap, config.s, delta_x).map_err(|e| at(e.to_string()))?;
    let b2 = theorem2_bound(v0, spectrum.gap, config.s, delta_x).map_err(|e| at(e.to_string()))?;
    let c1 = verify_envelope(&profile, stats.mean, &b1, config.grid_step, config.tolerance)
        .map_err(|e| at(e.to_string()))?;
    let c2 = verify_envelope(&profile, stats.mean, &b2, config.grid_step, config.tolerance)
        .map_err(|e| at(e.to_string()))?;

    Ok(SweepRow {
        h0,
        e0: spectrum.e0,
        e1: spectrum.e1,
        gap: spectrum.gap,
        delta_x,
        xi_fit,
        xi1: b1.xi1,
        xi2: b2.xi2,
        ratio1: std::f64::consts::SQRT_2 * b1.xi1 / delta_x,
        ratio2: std::f64::consts::SQRT_2 * b2.xi2 / delta_x,
        fit_r_squared,
        violations1: c1.violations.len(),
        violations2: c2.violations.len(),
    })
}

/// Runs every grid point (concurrently, on the current rayon pool), returns
/// rows in grid order and writes the CSV if `output_path` is set.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, ExperimentError> {
    config.validate()?;
    let rows = config.h0_grid.par_iter().map(|&h0| sweep_point(config, h0)).collect::<Result<Vec<_>, _>>()?;
    if let Some(path) = &config.output_path {
        let file = File::create(path).map_err(|e| ExperimentError::io(path, e))?;
        let mut out = BufWriter::new(file);
        write_sweep_csv(&mut out, &rows).and_then(|_| out.flush()).map_err(|e| ExperimentError::io(path, e))?;
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.csv_row())?;
    }
    Ok(())
}

/// Parses a sweep CSV. Violation counts are not stored and come back as zero.
pub fn read_sweep_csv<R: io::Read>(input: R) -> Result<Vec<SweepRow>, ExperimentError> {
    let mut lines = BufReader::new(input).lines();
    let header = match lines.next() {
        Some(line) => line.map_err(|e| ExperimentError::Parse(e.to_string()))?,
        None => return Err(ExperimentError::Parse("empty sweep file".into())),
    };
    if header.trim_end() != SWEEP_CSV_HEADER {
        return Err(ExperimentError::Parse(format!("unexpected header `{header}`")));
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line.map_err(|e| ExperimentError::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| ExperimentError::Parse(format!("line {}: {e}", k + 2)))?;
        if v.len() != 11 {
            return Err(ExperimentError::Parse(format!("line {}: expected 11 fields, found {}", k + 2, v.len())));
        }
        rows.push(SweepRow {
            h0: v[0],
            e0: v[1],
            e1: v[2],
            gap: v[3],
            delta_x: v[4],
            xi_fit: v[5],
            xi1: v[6],
            xi2: v[7],
            ratio1: v[8],
            ratio2: v[9],
            fit_r_squared: v[10],
            violations1: 0,
            violations2: 0,
        });
    }
    Ok(rows)
}
