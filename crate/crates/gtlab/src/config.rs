use std::path::{Path, PathBuf};

use gtlab_core::algorithms::DEFAULT_THETA;
use gtlab_core::{Algorithm, PriorKind};
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

/// Prior family swept by a config; the grid value is its free parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorFamily {
    /// Grid value is the constant probability `p`.
    Iid,
    /// Grid value is the scale (target sum) of a flat Dirichlet vector.
    Dirichlet,
    /// Grid value is the mean `1/lambda` before truncation at 1/2.
    TruncatedExponential,
}

impl PriorFamily {
    pub fn kind(self, size: usize, value: f64) -> PriorKind {
        match self {
            PriorFamily::Iid => PriorKind::Iid { size, p: value },
            PriorFamily::Dirichlet => PriorKind::Dirichlet { size, scale: value },
            PriorFamily::TruncatedExponential => PriorKind::TruncatedExponential { size, rate: 1.0 / value },
        }
    }
}

fn default_theta() -> f64 {
    DEFAULT_THETA
}

fn default_algorithms() -> Vec<String> {
    Algorithm::ALL.iter().map(|a| a.name().to_owned()).collect()
}

/// A sweep: one prior family over a linearly spaced grid, `trials` paired
/// trials per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub population_size: usize,
    pub prior: PriorFamily,
    pub grid_start: f64,
    pub grid_end: f64,
    pub grid_points: usize,
    pub trials: usize,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_owned(), source })?;
        let config: SweepConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.grid_points == 0 {
            return Err(HarnessError::Config("grid must have at least one point".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::Config("no algorithms requested".into()));
        }
        self.parsed_algorithms()?;
        if !(self.theta > 0.0 && self.theta < 0.5) {
            return Err(HarnessError::Config(format!("theta {} outside (0, 0.5)", self.theta)));
        }
        for value in self.grid() {
            self.prior.kind(self.population_size, value).validate()?;
        }
        Ok(())
    }

    pub fn parsed_algorithms(&self) -> Result<Vec<Algorithm>> {
        self.algorithms.iter().map(|name| name.parse::<Algorithm>().map_err(HarnessError::from)).collect()
    }

    /// `grid_points` linearly spaced values from `grid_start` to `grid_end`.
    pub fn grid(&self) -> Vec<f64> {
        if self.grid_points == 1 {
            return vec![self.grid_start];
        }
        let step = (self.grid_end - self.grid_start) / (self.grid_points - 1) as f64;
        (0..self.grid_points)
            .map(|k| if k + 1 == self.grid_points { self.grid_end } else { self.grid_start + step * k as f64 })
            .collect()
    }
}

/// Parses `family:key=value,...`, e.g. `dirichlet:size=1000,scale=5`,
/// `iid:size=100,p=0.05`, `texp:size=500,mean=0.0025` (or `rate=400`).
pub fn parse_prior(spec: &str) -> Result<PriorKind> {
    let bad = |msg: &str| HarnessError::Config(format!("prior `{spec}`: {msg}"));
    let (family, params) = spec.split_once(':').ok_or_else(|| bad("expected family:key=value,..."))?;
    let mut size = None;
    let mut value = None;
    for pair in params.split(',').filter(|s| !s.is_empty()) {
        let (key, raw) = pair.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let key = key.trim();
        let raw = raw.trim();
        if key == "size" || key == "n" {
            size = Some(raw.parse::<usize>().map_err(|_| bad("size must be an integer"))?);
            continue;
        }
        let x = raw.parse::<f64>().map_err(|_| bad("parameter must be a number"))?;
        value = Some(match (family, key) {
            ("iid", "p") | ("dirichlet", "scale") | ("texp" | "truncated_exponential", "rate") => x,
            ("texp" | "truncated_exponential", "mean") => 1.0 / x,
            _ => return Err(bad(&format!("unknown parameter `{key}`"))),
        });
    }
    let size = size.ok_or_else(|| bad("missing size"))?;
    let value = value.ok_or_else(|| bad("missing distribution parameter"))?;
    let kind = match family {
        "iid" => PriorKind::Iid { size, p: value },
        "dirichlet" => PriorKind::Dirichlet { size, scale: value },
        "texp" | "truncated_exponential" => PriorKind::TruncatedExponential { size, rate: value },
        other => return Err(bad(&format!("unknown family `{other}`"))),
    };
    kind.validate()?;
    Ok(kind)
}
