//! Optional TOML configuration. Every key is optional; command-line flags win.
//!
//! ```toml
//! [sweep]
//! l = 500
//! h0_min = -1.0
//! h0_max = -0.01
//! points = 100
//! s = 0.5
//! mu = 1.0
//! cv = 1.0          # omit and set fit_cv = true to fit per model
//! v0 = 1.0
//! grid_step = 0.5
//! out = "sweep.csv"
//!
//! [fuzz]
//! seed = 42
//! trials = 500
//! family = "nn"
//! min_sites = 4
//! max_sites = 40
//! max_n0 = 3
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub fuzz: FuzzSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub l: Option<usize>,
    pub h0_min: Option<f64>,
    pub h0_max: Option<f64>,
    pub points: Option<usize>,
    pub s: Option<f64>,
    pub mu: Option<f64>,
    pub cv: Option<f64>,
    pub fit_cv: Option<bool>,
    pub v0: Option<f64>,
    pub grid_step: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzSection {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub family: Option<String>,
    pub min_sites: Option<usize>,
    pub max_sites: Option<usize>,
    pub min_n0: Option<usize>,
    pub max_n0: Option<usize>,
    pub cv: Option<f64>,
    pub mu: Option<f64>,
    pub v0: Option<f64>,
    pub max_range: Option<usize>,
    pub hopping_scale: Option<f64>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, String> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}
