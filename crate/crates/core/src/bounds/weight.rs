//! Real site weights `g(x)` defining the diagonal operator `G`.

use super::BoundError;

/// Tabulated `g(x)` for `x = 1..=L`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    g: Vec<f64>,
}

/// Which trapezoid family to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrapezoidVariant {
    /// Flat zero up to `r_inner + δr/3`, unit ramp, plateau `δr/3`.
    Exponential,
    /// Flat zero up to `r_inner + 1`, unit ramp, plateau `δr − 2`.
    NearestNeighbor,
}

impl WeightFunction {
    pub fn new(g: Vec<f64>) -> Result<Self, BoundError> {
        if let Some(v) = g.iter().find(|v| !v.is_finite()) {
            return Err(BoundError::InvalidParameter(format!("weight value {v} is not finite")));
        }
        Ok(Self { g })
    }

    pub fn from_fn(sites: usize, f: impl Fn(usize) -> f64) -> Result<Self, BoundError> {
        Self::new((1..=sites).map(f).collect())
    }

    /// `g(x) = x`, i.e. `G` is the position operator.
    pub fn position(sites: usize) -> Self {
        Self { g: (1..=sites).map(|x| x as f64).collect() }
    }

    pub fn sites(&self) -> usize {
        self.g.len()
    }

    /// `g(x)` for 1-based `x`.
    pub fn at(&self, x: usize) -> f64 {
        self.g[x - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.g
    }

    pub fn max_abs(&self) -> f64 {
        self.g.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn shifted(&self, c: f64) -> Self {
        Self { g: self.g.iter().map(|v| v + c).collect() }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { g: self.g.iter().map(|v| v * factor).collect() }
    }
}

/// Radially symmetric trapezoid in `|x − center|` starting at `r_inner` with
/// region width `delta_r`.
pub fn trapezoid_g(
    sites: usize,
    center: f64,
    r_inner: f64,
    delta_r: f64,
    variant: TrapezoidVariant,
) -> Result<WeightFunction, BoundError> {
    if !(center.is_finite() && r_inner.is_finite() && delta_r.is_finite()) {
        return Err(BoundError::InvalidParameter("trapezoid parameters must be finite".into()));
    }
    let (start, plateau, min) = match variant {
        TrapezoidVariant::Exponential => (r_inner + delta_r / 3.0, delta_r / 3.0, 3.0),
        TrapezoidVariant::NearestNeighbor => (r_inner + 1.0, delta_r - 2.0, 2.0),
    };
    if delta_r <= min {
        return Err(BoundError::RegionTooNarrow { delta_r, min });
    }
    WeightFunction::from_fn(sites, |x| ((x as f64 - center).abs() - start).clamp(0.0, plateau))
}
