//! On-disk skill library: `index.json` plus one `<name>.json` per skill.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ast::Param;
use super::{Provenance, Skill, SkillError, SkillKind, SkillRegistry, UsageExample};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillFile {
    pub format_version: u32,
    pub name: String,
    pub params: Vec<Param>,
    pub source: String,
    pub description: String,
    pub usage_examples: Vec<UsageExample>,
    pub provenance: Provenance,
    pub kind: SkillKind,
    pub hierarchy: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexFile {
    pub format_version: u32,
    /// Load order; every skill's dependencies come before it.
    pub skills: Vec<String>,
}

impl From<&Skill> for SkillFile {
    fn from(s: &Skill) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            name: s.name.clone(),
            params: s.params.clone(),
            source: s.source.clone(),
            description: s.description.clone(),
            usage_examples: s.usage_examples.clone(),
            provenance: s.provenance,
            kind: s.kind,
            hierarchy: s.hierarchy,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> SkillError {
    SkillError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), SkillError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, SkillError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

impl SkillRegistry {
    /// Writes the library to `dir`, replacing any previous `*.json` there.
    pub fn save(&self, dir: &Path) -> Result<(), SkillError> {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        for entry in std::fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
            let p = entry.map_err(|e| io_err(dir, e))?.path();
            if p.extension().is_some_and(|e| e == "json") {
                std::fs::remove_file(&p).map_err(|e| io_err(&p, e))?;
            }
        }
        for s in self.iter() {
            write_json(&dir.join(format!("{}.json", s.name)), &SkillFile::from(s))?;
        }
        write_json(
            &dir.join("index.json"),
            &IndexFile {
                format_version: FORMAT_VERSION,
                skills: self.names().to_vec(),
            },
        )
    }

    /// Loads a library, recompiling every skill and rejecting files whose
    /// stored metadata disagrees with their source.
    pub fn load(dir: &Path) -> Result<SkillRegistry, SkillError> {
        let index: IndexFile = read_json(&dir.join("index.json"))?;
        if index.format_version != FORMAT_VERSION {
            return Err(SkillError::Format(index.format_version));
        }
        let mut reg = SkillRegistry::new();
        for name in &index.skills {
            let file: SkillFile = read_json(&dir.join(format!("{name}.json")))?;
            if file.format_version != FORMAT_VERSION {
                return Err(SkillError::Format(file.format_version));
            }
            let skill = Skill::compile(&file.source, file.provenance, &reg)?;
            let stored = SkillFile::from(&skill);
            if stored != file || &skill.name != name {
                return Err(SkillError::Stale(name.clone()));
            }
            reg.register(skill)?;
        }
        Ok(reg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skill::builtin::base_library;

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let reg = base_library();
        reg.save(dir.path()).unwrap();
        let back = SkillRegistry::load(dir.path()).unwrap();
        assert_eq!(reg, back);
    }

    #[test]
    fn tampered_kind_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        base_library().save(dir.path()).unwrap();
        let p = dir.path().join("tables_add.json");
        let text = std::fs::read_to_string(&p).unwrap().replace("AtomicAPI", "AtomicUI");
        std::fs::write(&p, text).unwrap();
        assert!(matches!(
            SkillRegistry::load(dir.path()),
            Err(SkillError::Stale(n)) if n == "tables_add"
        ));
    }

    #[test]
    fn bundled_library_extends_builtin() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/skills");
        let stored = SkillRegistry::load(&dir).unwrap();
        for s in base_library().iter() {
            assert_eq!(stored.get(&s.name), Some(s), "{}", s.name);
        }
    }
}
