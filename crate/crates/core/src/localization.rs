//! Spatial statistics of a ground state: density per supersite, position
//! mean and variance, tail probabilities and a fitted decay length.

use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::lattice::ModelSpec;

/// Allowed deviation of `Σ p_x` from one.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Default density floor below which points are left out of the fit.
pub const DEFAULT_FIT_FLOOR: f64 = 1e-13;
/// Default number of sites excluded next to each open edge.
pub const DEFAULT_BOUNDARY_MARGIN: usize = 10;
const MIN_FIT_POINTS: usize = 4;
/// Slopes above this count as flat.
const FLAT_SLOPE: f64 = -1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("vector has {found} entries, model needs {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("invalid probability at site {site}: {value}")]
    InvalidProbability { site: usize, value: f64 },
    #[error("only {found} usable points for the decay fit, need {needed}")]
    InsufficientData { found: usize, needed: usize },
    #[error("profile does not decay away from the center (slope {slope:e})")]
    NonDecaying { slope: f64 },
}

/// Probability per supersite, `p[k]` belongs to `x = k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    p: Vec<f64>,
}

/// `⟨x⟩` and `(ΔX)²` in lattice units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionStats {
    pub mean: f64,
    pub variance: f64,
}

impl PositionStats {
    pub fn std_dev(&self) -> f64 {
        self.variance.max(0.0).sqrt()
    }
}

/// Least-squares fit of `ln p_x = intercept − |x − center| / xi_fit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub xi_fit: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Smallest and largest `|x − center|` among the fitted points.
    pub window: (f64, f64),
    pub points: usize,
}

impl DecayFit {
    pub const CSV_HEADER: &'static str = "xi_fit,intercept,r_squared,window_lo,window_hi";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.xi_fit, self.intercept, self.r_squared, self.window.0, self.window.1
        )
    }
}

/// `p_x = Σ_i |α_(x,i)|²`.
pub fn density(psi: &[Complex64], spec: &ModelSpec) -> Result<DensityProfile, AnalysisError> {
    if psi.len() != spec.dim() {
        return Err(AnalysisError::DimensionMismatch { expected: spec.dim(), found: psi.len() });
    }
    let p: Vec<f64> = psi.chunks_exact(spec.internal_dim()).map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(AnalysisError::NotNormalized(total));
    }
    Ok(DensityProfile { p })
}

impl DensityProfile {
    /// Accepts probabilities that are nonnegative and sum to one.
    pub fn new(p: Vec<f64>) -> Result<Self, AnalysisError> {
        for (k, &v) in p.iter().enumerate() {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(AnalysisError::InvalidProbability { site: k + 1, value: v });
            }
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(AnalysisError::NotNormalized(total));
        }
        Ok(Self { p })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(w: &[f64]) -> Result<Self, AnalysisError> {
        let total: f64 = w.iter().sum();
        Self::new(w.iter().map(|v| v / total).collect())
    }

    pub fn sites(&self) -> usize {
        self.p.len()
    }

    /// Probabilities in site order.
    pub fn values(&self) -> &[f64] {
        &self.p
    }

    /// `(x, p_x)` pairs with 1-based `x`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.p.iter().enumerate().map(|(k, &v)| (k + 1, v))
    }

    pub fn position_stats(&self) -> PositionStats {
        let mean: f64 = self.iter().map(|(x, p)| x as f64 * p).sum();
        let variance: f64 = self.iter().map(|(x, p)| (x as f64 - mean).powi(2) * p).sum();
        PositionStats { mean, variance }
    }

    /// `P(|x − mean| >= r)`.
    pub fn tail(&self, mean: f64, r: f64) -> f64 {
        let t: f64 = self.iter().filter(|&(x, _)| (x as f64 - mean).abs() >= r).map(|(_, p)| p).sum();
        t.min(1.0)
    }

    /// Largest `|x − mean|` over the lattice.
    pub fn max_distance(&self, mean: f64) -> f64 {
        (mean - 1.0).abs().max((self.p.len() as f64 - mean).abs())
    }

    /// Site with the largest probability (first on ties).
    pub fn argmax_site(&self) -> usize {
        let mut best = 0;
        for (k, &v) in self.p.iter().enumerate() {
            if v > self.p[best] {
                best = k;
            }
        }
        best + 1
    }

    /// Writes `x,p_x` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,p_x")?;
        for (x, p) in self.iter() {
            writeln!(out, "{x},{p:.16e}")?;
        }
        Ok(())
    }
}

/// Fits `ln p_x` linearly in `|x − center|`, both sides jointly. Points
/// below `floor` and within `boundary_margin` sites of either edge are
/// skipped.
pub fn fit_localization_length(
    profile: &DensityProfile,
    center: f64,
    floor: f64,
    boundary_margin: usize,
) -> Result<DecayFit, AnalysisError> {
    let l = profile.sites();
    let pts: Vec<(f64, f64)> = profile
        .iter()
        .filter(|&(x, p)| p >= floor && p > 0.0 && x > boundary_margin && x + boundary_margin <= l)
        .map(|(x, p)| ((x as f64 - center).abs(), p.ln()))
        .collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(AnalysisError::InsufficientData { found: pts.len(), needed: MIN_FIT_POINTS });
    }
    let count = pts.len() as f64;
    let mean_d = pts.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_d).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_d) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::InsufficientData { found: 1, needed: 2 });
    }
    let slope = sxy / sxx;
    if slope >= FLAT_SLOPE {
        return Err(AnalysisError::NonDecaying { slope });
    }
    let intercept = mean_y - slope * mean_d;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayFit { xi_fit: -1.0 / slope, intercept, r_squared, window: (lo, hi), points: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Block;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn chain(l: usize, n0: usize) -> ModelSpec {
        ModelSpec::builder(l, n0).hopping(1, 2, Block::identity(n0, 1.0)).build().unwrap()
    }

    #[test]
    fn density_examples() {
        let p = density(&[c(1.0), c(0.0), c(0.0)], &chain(3, 1)).unwrap();
        assert_eq!(p.values(), &[1.0, 0.0, 0.0]);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = density(&[c(s), c(s)], &chain(2, 1)).unwrap();
        assert_abs_diff_eq!(p.values()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.values()[1], 0.5, epsilon = 1e-15);

        let p = density(&[c(0.6), Complex64::new(0.0, 0.8), c(0.0), c(0.0)], &chain(2, 2)).unwrap();
        assert_abs_diff_eq!(p.values()[0], 1.0, epsilon = 1e-15);
        assert_eq!(p.values()[1], 0.0);

        assert!(matches!(density(&[c(1.0)], &chain(2, 1)), Err(AnalysisError::DimensionMismatch { .. })));
        assert!(matches!(density(&[c(1.0), c(1.0)], &chain(2, 1)), Err(AnalysisError::NotNormalized(_))));
    }

    #[test]
    fn position_stats_examples() {
        let mut w = vec![0.0; 7];
        w[4] = 1.0;
        let s = DensityProfile::new(w).unwrap().position_stats();
        assert_eq!((s.mean, s.variance), (5.0, 0.0));

        let s = DensityProfile::new(vec![0.5, 0.5]).unwrap().position_stats();
        assert_abs_diff_eq!(s.mean, 1.5);
        assert_abs_diff_eq!(s.variance, 0.25);

        for l in [1usize, 2, 5, 40] {
            let s = DensityProfile::from_weights(&vec![1.0; l]).unwrap().position_stats();
            let lf = l as f64;
            assert_abs_diff_eq!(s.variance, (lf * lf - 1.0) / 12.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn tail_examples() {
        let mut w = vec![0.0; 5];
        w[2] = 1.0;
        let delta = DensityProfile::new(w).unwrap();
        assert_eq!(delta.tail(3.0, 0.5), 0.0);
        assert_eq!(delta.tail(3.0, 0.0), 1.0);

        let half = DensityProfile::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(half.tail(1.5, 0.5), 1.0);

        let uniform = DensityProfile::new(vec![0.25; 4]).unwrap();
        assert_eq!(uniform.tail(2.5, 1.6), 0.0);
        assert_eq!(uniform.tail(2.5, 1.5), 0.5);
    }

    #[test]
    fn fit_recovers_exact_exponential() {
        let center = 51.0;
        let w: Vec<f64> = (1..=101).map(|x| (-(x as f64 - center).abs() / 3.0).exp()).collect();
        let profile = DensityProfile::from_weights(&w).unwrap();
        let fit = fit_localization_length(&profile, center, DEFAULT_FIT_FLOOR, DEFAULT_BOUNDARY_MARGIN).unwrap();
        assert!((fit.xi_fit - 3.0).abs() < 1e-6 * 3.0, "{fit:?}");
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert_eq!(fit.window.0, 0.0);
        assert_eq!(fit.window.1, 40.0);
    }

    #[test]
    fn fit_errors() {
        let uniform = DensityProfile::from_weights(&[1.0; 30]).unwrap();
        assert!(matches!(
            fit_localization_length(&uniform, uniform.argmax_site() as f64, DEFAULT_FIT_FLOOR, 2),
            Err(AnalysisError::NonDecaying { .. })
        ));
        let short = DensityProfile::from_weights(&[1.0, 2.0, 1.0]).unwrap();
        assert!(matches!(
            fit_localization_length(&short, 2.0, DEFAULT_FIT_FLOOR, 0),
            Err(AnalysisError::InsufficientData { found: 3, .. })
        ));
    }

    #[test]
    fn csv_outputs() {
        let mut buf = Vec::new();
        DensityProfile::new(vec![0.25, 0.75]).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,p_x\n1,2.5"));
        let fit = DecayFit { xi_fit: 2.0, intercept: -1.0, r_squared: 1.0, window: (0.0, 5.0), points: 6 };
        assert_eq!(fit.csv_row().split(',').count(), 5);
    }
}
