//! The bundled asset corpus: seeds, help documents, tasks, equivalences,
//! UI-tree fixtures and the learned skill library.
//!
//! ```text
//! assets/
//!   seeds/*.json        SeedFile
//!   helpdocs/*.json     HelpDocScript
//!   tasks/*.json        TaskSpec
//!   api_equiv.json      EquivalenceTable
//!   trees/              ControlNode dumps and ApiCoverageMap files
//!   skills/             skill library (index.json + one file per skill)
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bench::{load_tasks, TaskSpec};
use crate::env::{load_seed_dir, EnvError, SeedFile};
use crate::explore::{
    follow_corpus, load_helpdocs, EquivalenceEntry, EquivalenceTable, ExplorationReport, HelpDocScript,
};
use crate::planner::Planner;
use crate::skill::builtin::base_library;
use crate::skill::{SkillError, SkillRegistry};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Skill(#[from] SkillError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub root: PathBuf,
    pub seeds: BTreeMap<String, SeedFile>,
    pub helpdocs: Vec<HelpDocScript>,
    pub tasks: Vec<TaskSpec>,
    pub equivalences: EquivalenceTable,
}

impl Corpus {
    /// `assets/` next to this crate's manifest.
    pub fn bundled_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("assets")
    }

    pub fn bundled() -> Result<Self, CorpusError> {
        Self::load(&Self::bundled_dir(), None)
    }

    /// Loads and cross-checks a corpus. `seed_dir` overrides `root/seeds`.
    pub fn load(root: &Path, seed_dir: Option<&Path>) -> Result<Self, CorpusError> {
        let seeds = load_seed_dir(&seed_dir.map(Path::to_path_buf).unwrap_or_else(|| root.join("seeds")))?;
        let helpdocs = load_helpdocs(&root.join("helpdocs"))?;
        let tasks = load_tasks(&root.join("tasks"))?;
        let equivalences = EquivalenceTable::load(&root.join("api_equiv.json"))?;
        for h in &helpdocs {
            h.check(&seeds).map_err(CorpusError::Invalid)?;
        }
        for t in &tasks {
            t.check(&seeds).map_err(CorpusError::Invalid)?;
        }
        if !seeds.contains_key(&equivalences.canonical_seed) {
            return Err(CorpusError::Invalid(format!(
                "canonical seed `{}` is missing",
                equivalences.canonical_seed
            )));
        }
        Ok(Self {
            root: root.to_path_buf(),
            seeds,
            helpdocs,
            tasks,
            equivalences,
        })
    }

    pub fn canonical_seed(&self) -> &SeedFile {
        &self.seeds[&self.equivalences.canonical_seed]
    }

    /// Equivalence entries whose proof holds on the canonical seed.
    pub fn api_docs(&self) -> Vec<EquivalenceEntry> {
        self.equivalences.validated(self.canonical_seed())
    }

    pub fn task(&self, id: &str) -> Option<&TaskSpec> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn skills_dir(&self) -> PathBuf {
        self.root.join("skills")
    }

    pub fn trees_dir(&self) -> PathBuf {
        self.root.join("trees")
    }

    /// Seeds in id order.
    pub fn seed_list(&self) -> Vec<SeedFile> {
        self.seeds.values().cloned().collect()
    }

    /// The base library extended by following every help document.
    pub fn learn_library(&self, planner: &mut Planner) -> (SkillRegistry, ExplorationReport) {
        let mut registry = base_library();
        let report = follow_corpus(&self.seeds, &self.helpdocs, planner, &mut registry, &self.api_docs());
        (registry, report)
    }

    /// The stored library under `skills_dir`, or `dir` when given.
    pub fn load_library(&self, dir: Option<&Path>) -> Result<SkillRegistry, CorpusError> {
        Ok(SkillRegistry::load(&dir.map(Path::to_path_buf).unwrap_or_else(|| self.skills_dir()))?)
    }
}
