//! JSON file persisting constants, estimates and the resulting table
//! between runs. Entries are keyed by a digest of every numerically
//! relevant setting, so a changed setting never reuses a stale entry.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{CandidateGridSpec, DistanceTable, GHEstimate, ModelPair};
use crate::blanusa::BlanusaConstants;
use crate::error::Result;
use crate::quadrature::QuadratureSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedEstimate {
    pub key: String,
    pub estimate: GHEstimate,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DistanceCache {
    pub constants: Option<BlanusaConstants>,
    pub estimates: Vec<CachedEstimate>,
    pub table: DistanceTable,
}

fn digest(value: &impl Serialize) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

impl DistanceCache {
    /// Reads the cache, or starts an empty one when the file does not exist.
    pub fn load(path: &Path) -> Result<Self> {
        match fs::read_to_string(path) {
            Ok(text) => Ok(serde_json::from_str(&text)?),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(DistanceCache::default()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Digest identifying one estimate configuration.
    pub fn estimate_key(
        pair: ModelPair,
        grid: &CandidateGridSpec,
        quadrature: &QuadratureSpec,
        sup_grid_points: usize,
    ) -> Result<String> {
        digest(&(pair, grid, quadrature, sup_grid_points))
    }

    /// Cached constants, if they were computed with the same settings.
    pub fn constants_for(&self, q: &QuadratureSpec, sup_grid_points: usize) -> Option<&BlanusaConstants> {
        self.constants
            .as_ref()
            .filter(|c| c.quadrature == *q && c.sup_grid_points == sup_grid_points)
    }

    pub fn lookup(&self, key: &str) -> Option<&GHEstimate> {
        self.estimates.iter().find(|e| e.key == key).map(|e| &e.estimate)
    }

    /// Stores an estimate (replacing one with the same key) and folds it into the table.
    pub fn insert(&mut self, key: String, estimate: GHEstimate) -> Result<()> {
        self.table = self.table.clone().with_estimate(&estimate)?;
        match self.estimates.iter_mut().find(|e| e.key == key) {
            Some(slot) => slot.estimate = estimate,
            None => self.estimates.push(CachedEstimate { key, estimate }),
        }
        Ok(())
    }
}
