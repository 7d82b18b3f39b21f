use std::collections::{BTreeMap, BTreeSet};

use super::{Provenance, Skill, SkillError};
use crate::exec::ActionRegistry;
use crate::validate::validate_static;

/// Skills by name, their load order and the `use` edges between them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SkillRegistry {
    skills: BTreeMap<String, Skill>,
    order: Vec<String>,
    edges: BTreeMap<String, BTreeSet<String>>,
}

/// Lowercased alphanumeric words.
pub(crate) fn tokens(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
        .collect()
}

impl SkillRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Skill> {
        self.skills.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.skills.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.skills.len()
    }

    pub fn is_empty(&self) -> bool {
        self.skills.is_empty()
    }

    /// Skills in registration order.
    pub fn iter(&self) -> impl Iterator<Item = &Skill> {
        self.order.iter().map(|n| &self.skills[n])
    }

    pub fn names(&self) -> &[String] {
        &self.order
    }

    /// `use` edges: skill name to the skills it uses directly.
    pub fn edges(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.edges
    }

    pub fn dependents(&self, name: &str) -> Vec<String> {
        self.edges
            .iter()
            .filter(|(_, uses)| uses.contains(name))
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// Validates, recomputes kind and hierarchy, and inserts.
    pub fn register(&mut self, skill: Skill) -> Result<&Skill, SkillError> {
        if self.contains(&skill.name) {
            return Err(SkillError::Duplicate(skill.name));
        }
        let findings = validate_static(&skill.source, self, ActionRegistry::standard());
        if !findings.is_empty() {
            return Err(SkillError::Validation(findings));
        }
        let fresh = Skill::compile(&skill.source, skill.provenance, self)?;
        if fresh.name != skill.name {
            return Err(SkillError::Stale(skill.name));
        }
        let name = fresh.name.clone();
        self.edges.insert(name.clone(), fresh.uses());
        self.order.push(name.clone());
        self.skills.insert(name.clone(), fresh);
        Ok(&self.skills[&name])
    }

    pub fn register_source(&mut self, source: &str, provenance: Provenance) -> Result<&Skill, SkillError> {
        let findings = validate_static(source, self, ActionRegistry::standard());
        if !findings.is_empty() {
            return Err(SkillError::Validation(findings));
        }
        let skill = Skill::compile(source, provenance, self)?;
        self.register(skill)
    }

    pub fn remove(&mut self, name: &str) -> Result<Skill, SkillError> {
        if !self.contains(name) {
            return Err(SkillError::NotFound(name.to_string()));
        }
        let deps = self.dependents(name);
        if !deps.is_empty() {
            return Err(SkillError::HasDependents(name.to_string(), deps));
        }
        self.order.retain(|n| n != name);
        self.edges.remove(name);
        Ok(self.skills.remove(name).expect("checked above"))
    }

    /// Ranks skills by how many query tokens occur in their name and
    /// description; ties go to the lexicographically smaller name.
    pub fn find_reusable<S: AsRef<str>>(&self, query: &[S]) -> Vec<&Skill> {
        let wanted: BTreeSet<String> = query.iter().flat_map(|q| tokens(q.as_ref())).collect();
        let mut scored: Vec<(usize, &Skill)> = self
            .skills
            .values()
            .filter_map(|s| {
                let mut have = tokens(&s.name);
                have.extend(tokens(&s.description));
                let score = wanted.intersection(&have).count();
                (score > 0).then_some((score, s))
            })
            .collect();
        scored.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.name.cmp(&b.1.name)));
        scored.into_iter().map(|(_, s)| s).collect()
    }

    /// Skills whose direct and nested hierarchy readings differ.
    pub fn hierarchy_disagreements(&self) -> Vec<(String, u32, u32)> {
        self.iter()
            .filter_map(|s| {
                let nested = super::classify::nested_hierarchy(&s.code, self).ok()?;
                (nested != s.hierarchy).then(|| (s.name.clone(), s.hierarchy, nested))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skill::builtin::base_library;

    const HF: &str = "skill insert_header_footer(header: string, footer: string) \"\"\"Insert a header and a footer.\nExample: insert_header_footer(header: \"header\", footer: \"footer\")\nEffect: header == \"header\" && footer == \"footer\"\n\"\"\" {\n  use insert_header(text: $header);\n  use insert_footer(text: $footer);\n}";

    #[test]
    fn register_composite_updates_dag() {
        let mut reg = base_library();
        let s = reg.register_source(HF, Provenance::Follower).unwrap();
        assert_eq!(s.hierarchy, 2);
        assert_eq!(
            reg.edges()["insert_header_footer"],
            ["insert_footer", "insert_header"].iter().map(|s| s.to_string()).collect()
        );
        assert!(matches!(
            reg.remove("insert_header"),
            Err(SkillError::HasDependents(..))
        ));
        reg.remove("insert_header_footer").unwrap();
        reg.remove("insert_header").unwrap();
    }

    #[test]
    fn self_use_is_a_cycle() {
        let mut reg = base_library();
        let src = "skill loop() \"\"\"d\nExample: loop()\"\"\" { use loop(); }";
        let e = reg.register_source(src, Provenance::Follower).unwrap_err();
        match e {
            SkillError::Validation(f) => assert_eq!(f[0].rule, crate::validate::StaticRule::CompositionCycle),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_name() {
        let mut reg = base_library();
        reg.register_source(HF, Provenance::Follower).unwrap();
        assert!(matches!(
            reg.register_source(HF, Provenance::Follower),
            Err(SkillError::Duplicate(_))
        ));
    }

    #[test]
    fn select_text_ranks_first() {
        let reg = base_library();
        let hits = reg.find_reusable(&["select", "text"]);
        assert_eq!(hits[0].name, "select_text");
        assert!(reg.find_reusable(&["zebra"]).is_empty());
    }

    #[test]
    fn classification_stable_under_growth() {
        let mut reg = base_library();
        let before: Vec<_> = reg.iter().map(|s| (s.name.clone(), s.kind, s.hierarchy)).collect();
        reg.register_source(HF, Provenance::Follower).unwrap();
        for (name, kind, h) in before {
            let s = reg.get(&name).unwrap();
            let again = crate::skill::classify::classify_kind(&s.code, Some(&name), &reg).unwrap();
            assert_eq!((again, s.hierarchy), (kind, h));
        }
    }

    #[test]
    fn nested_reading_is_flagged() {
        let mut reg = base_library();
        reg.register_source(HF, Provenance::Follower).unwrap();
        let src = "skill hf_and_size(header: string, footer: string) \"\"\"d\nExample: hf_and_size(header: \"a\", footer: \"b\")\"\"\" {\n use insert_header_footer(header: $header, footer: $footer);\n call set_paper_size(size: \"A4\");\n}";
        reg.register_source(src, Provenance::Follower).unwrap();
        assert_eq!(
            reg.hierarchy_disagreements(),
            vec![("hf_and_size".to_string(), 2, 3)]
        );
    }
}
