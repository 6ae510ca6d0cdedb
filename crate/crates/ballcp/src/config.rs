//! Run configuration: defaults, TOML file loading, and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Settings shared by every subcommand. A TOML file supplies any subset
/// of the fields, command line flags override the file, and defaults
/// fill the rest. Identical configurations produce byte-identical
/// reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Master seed; every randomized step fans out as (seed, label, trial).
    pub seed: u64,
    /// Shared numerical tolerance for verdicts and residual gates.
    pub tol: f64,
    /// Truncation degree for expansions, fits, and lifts.
    pub degree_cap: usize,
    /// Trial count for randomized checks.
    pub trials: u64,
    /// Builtin function name for subcommands that take one.
    pub function: Option<String>,
    /// Scaling grid for the dilate subcommand, strictly increasing in (0, 1).
    pub grid: Option<Vec<f64>>,
    /// Report output path; stdout only when absent.
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 7,
            tol: 1e-8,
            degree_cap: 3,
            trials: 200,
            function: None,
            grid: None,
            out: None,
        }
    }
}

impl ExperimentConfig {
    /// Parse a TOML document; unknown fields and type mismatches are
    /// reported with their field paths.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Config(format!("tol: must lie in (0, 1), got {}", self.tol)));
        }
        if self.degree_cap > 8 {
            return Err(Error::Config(format!(
                "degree_cap: {} exceeds the supported cap of 8",
                self.degree_cap
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials: must be positive".into()));
        }
        if let Some(grid) = &self.grid {
            if grid.len() < 3 {
                return Err(Error::Config("grid: needs at least three points".into()));
            }
            if grid.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
                return Err(Error::Config("grid: every point must lie in (0, 1)".into()));
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config("grid: points must strictly increase".into()));
            }
        }
        Ok(())
    }
}
