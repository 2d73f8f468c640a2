//! Versioned JSON model file.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "delta": 16,
//!   "x_max": 9,
//!   "config": { "delta": 16, "batch_size": 128, ... },
//!   "created_at": "2026-01-01T00:00:00Z",
//!   "teams": [ { "name": "...", "phi": [...], "psi": [...] } ]
//! }
//! ```
//!
//! Teams appear in registry order. Floats use the shortest representation
//! that parses back to the identical `f64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::match_data::TeamRegistry;
use crate::trainer::{EmbeddingModel, TrainConfig};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamVectors {
    pub name: String,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub delta: usize,
    pub x_max: u32,
    pub config: TrainConfig,
    pub created_at: String,
    pub teams: Vec<TeamVectors>,
}

impl ModelFile {
    /// Snapshot of `model`, stamped with the current UTC time.
    pub fn new(model: &EmbeddingModel, config: &TrainConfig) -> Self {
        let created_at = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        Self::with_timestamp(model, config, created_at)
    }

    pub fn with_timestamp(
        model: &EmbeddingModel,
        config: &TrainConfig,
        created_at: String,
    ) -> Self {
        let teams = model
            .registry()
            .ids()
            .map(|id| TeamVectors {
                name: model.registry().name(id).unwrap_or_default().to_owned(),
                phi: model.phi(id).to_vec(),
                psi: model.psi(id).to_vec(),
            })
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            delta: model.delta(),
            x_max: model.x_max(),
            config: config.clone(),
            created_at,
            teams,
        }
    }

    pub fn to_model(&self) -> Result<EmbeddingModel> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let registry = TeamRegistry::from_names(self.teams.iter().map(|t| t.name.clone()))
            .map_err(|e| Error::ModelFormat(e.to_string()))?;
        let mut phi = Vec::with_capacity(self.teams.len() * self.delta);
        let mut psi = Vec::with_capacity(self.teams.len() * self.delta);
        for t in &self.teams {
            if t.phi.len() != self.delta || t.psi.len() != self.delta {
                return Err(Error::ModelFormat(format!(
                    "team {:?} has vectors of length {}/{}, expected {}",
                    t.name,
                    t.phi.len(),
                    t.psi.len(),
                    self.delta
                )));
            }
            phi.extend_from_slice(&t.phi);
            psi.extend_from_slice(&t.psi);
        }
        EmbeddingModel::from_parts(registry, self.delta, self.x_max, phi, psi)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(self.to_json()?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
