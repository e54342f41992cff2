use std::fs;
use std::path::{Path, PathBuf};

use gh_core::blanusa::DEFAULT_SUP_GRID_POINTS;
use gh_core::gh_estimate::CandidateGridSpec;
use gh_core::quadrature::QuadratureSpec;
use gh_core::{GhError, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// Settings shared by every subcommand. Loaded from `--config`, then
/// overridden by command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub quadrature: QuadratureSpec,
    pub sup_grid_points: usize,
    pub grid: CandidateGridSpec,
    pub cache: Option<PathBuf>,
    pub format: OutputFormat,
    pub threads: Option<usize>,
    /// Seed for the early-break shuffles and the random invariant checks.
    pub seed: u64,
    /// Side of the lattice on which pullback deviations are reported.
    pub pullback_grid: usize,
    pub pullback_step: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            quadrature: QuadratureSpec::default(),
            sup_grid_points: DEFAULT_SUP_GRID_POINTS,
            grid: CandidateGridSpec::default(),
            cache: None,
            format: OutputFormat::Json,
            threads: None,
            seed: 0,
            pullback_grid: 11,
            pullback_step: 1e-5,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| GhError::Format(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        self.grid.validate()?;
        if self.threads == Some(0) {
            return Err(GhError::Parameter("threads must be at least 1".into()));
        }
        if self.pullback_grid < 1 || !(self.pullback_step > 0.0) {
            return Err(GhError::Parameter("pullback grid and step must be positive".into()));
        }
        Ok(())
    }
}
