//! Help-document scripts for follower-driven exploration.
//!
//! File schema (`helpdocs/*.json`):
//!
//! ```json
//! {"id": "hd01", "title": "Insert a header and footer",
//!  "steps": ["click Insert tab", "click Header", "type 'header'"],
//!  "target_seed": "empty"}
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::{EnvError, SeedFile};
use crate::planner::Instruction;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HelpDocScript {
    pub id: String,
    pub title: String,
    pub steps: Vec<String>,
    pub target_seed: String,
}

impl HelpDocScript {
    /// Checks the invariants against the available seeds.
    pub fn check(&self, seeds: &BTreeMap<String, SeedFile>) -> Result<(), String> {
        if self.steps.is_empty() {
            return Err(format!("script `{}` has no steps", self.id));
        }
        if !seeds.contains_key(&self.target_seed) {
            return Err(format!("script `{}` targets unknown seed `{}`", self.id, self.target_seed));
        }
        for s in &self.steps {
            Instruction::parse(s).map_err(|e| format!("script `{}`: {e}", self.id))?;
        }
        Ok(())
    }
}

/// Loads every `*.json` script in `dir`, sorted by id.
pub fn load_helpdocs(dir: &Path) -> Result<Vec<HelpDocScript>, EnvError> {
    let io = |path: &Path, source| EnvError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| io(dir, e))? {
        let path = entry.map_err(|e| io(dir, e))?.path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let text = std::fs::read_to_string(&path).map_err(|e| io(&path, e))?;
        let script: HelpDocScript = serde_json::from_str(&text).map_err(|source| EnvError::Json {
            path: path.display().to_string(),
            source,
        })?;
        out.push(script);
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}
