//! Benchmark task files.
//!
//! Schema (`tasks/*.json`):
//!
//! ```json
//! {"id": "t_fig1", "description": "Insert a 2x2 table", "difficulty": "L1",
//!  "seed": "empty", "checker": "tables.count == 1",
//!  "reference_steps": 3,
//!  "ui_steps": ["click Insert tab", "click Table", "click 2x2 Table"]}
//! ```
//!
//! `ui_steps` is the human UI procedure; the scripted planner replays it
//! under the UI-only policy and translates it under API-first.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::{EnvError, SeedFile};
use crate::planner::Instruction;
use crate::validate::Checker;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Difficulty {
    L1,
    L2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: String,
    pub description: String,
    pub difficulty: Difficulty,
    pub seed: String,
    pub checker: String,
    pub reference_steps: u32,
    pub ui_steps: Vec<String>,
}

impl TaskSpec {
    pub fn check(&self, seeds: &BTreeMap<String, SeedFile>) -> Result<(), String> {
        Checker::parse(&self.checker).map_err(|e| format!("task `{}`: checker: {e}", self.id))?;
        if self.reference_steps < 1 {
            return Err(format!("task `{}`: reference_steps must be at least 1", self.id));
        }
        if !seeds.contains_key(&self.seed) {
            return Err(format!("task `{}`: unknown seed `{}`", self.id, self.seed));
        }
        for s in &self.ui_steps {
            Instruction::parse(s).map_err(|e| format!("task `{}`: {e}", self.id))?;
        }
        Ok(())
    }
}

/// Loads every `*.json` task in `dir`, sorted by id.
pub fn load_tasks(dir: &Path) -> Result<Vec<TaskSpec>, EnvError> {
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
        let task: TaskSpec = serde_json::from_str(&text).map_err(|source| EnvError::Json {
            path: path.display().to_string(),
            source,
        })?;
        out.push(task);
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}
