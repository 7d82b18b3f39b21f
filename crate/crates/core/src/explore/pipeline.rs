//! Segment to registered skill: summarize, generate, validate, translate.

use std::collections::BTreeSet;

use crate::env::{EnvSession, SessionSnapshot};
use crate::exec::ActionRegistry;
use crate::planner::{Candidate, Planner, QueryContext};
use crate::skill::classify::flatten;
use crate::skill::{parse_invocation, Provenance, Skill, SkillKind, SkillRegistry};
use crate::validate::{validate_dynamic, validate_static, DynamicOutcome};

use super::breakpoints::{Recording, Segment};
use super::equivalence::EquivalenceEntry;
use super::generate::unique_name;
use super::report::{ExplorationReport, SkillEntry, Stage};
use super::translate::rename_source;
use super::trajectory::Origin;

/// Shared state for turning segments into library skills.
pub struct Pipeline<'a> {
    pub planner: &'a mut Planner,
    pub registry: &'a mut SkillRegistry,
    /// Validated UI-to-API equivalences.
    pub api_docs: &'a [EquivalenceEntry],
}

struct Accepted {
    skill: Skill,
    outcome: DynamicOutcome,
}

/// Same parameter signature and same flattened body, so a skill that only
/// wraps another one counts as a copy of it.
fn same_program(a: &Skill, b: &Skill, registry: &SkillRegistry) -> bool {
    let flat = |s: &Skill| flatten(&s.code, registry).unwrap_or_else(|_| s.code.statements.clone());
    a.params.len() == b.params.len()
        && a.params.iter().zip(&b.params).all(|(x, y)| x.key == y.key && x.ty == y.ty)
        && (a.code == b.code || flat(a) == flat(b))
}

fn provenance_of(origin: Origin) -> Provenance {
    match origin {
        Origin::Follower => Provenance::Follower,
        Origin::Explorer => Provenance::Explorer,
    }
}

/// Runs the first usage example of `source` from `start` and returns the
/// resulting content digest.
fn example_digest(
    source: &str,
    provenance: Provenance,
    registry: &SkillRegistry,
    seed_id: &str,
    start: &SessionSnapshot,
) -> Result<String, String> {
    let mut lib = registry.clone();
    let name = lib.register_source(source, provenance).map_err(|e| e.to_string())?.name.clone();
    let skill = lib.get(&name).expect("just registered");
    let ex = skill.usage_examples.first().ok_or("no usage example")?;
    let inv = parse_invocation(&ex.invocation).map_err(|e| e.to_string())?;
    let mut session = EnvSession::from_snapshot(seed_id, start).without_xml();
    let r = session.step(&lib, &inv).map_err(|e| e.to_string())?;
    if !r.ok {
        return Err(r.message);
    }
    Ok(session.state().content_digest())
}

impl Pipeline<'_> {
    fn duplicate_of(&self, skill: &Skill) -> Option<String> {
        self.registry
            .iter()
            .find(|s| same_program(s, skill, self.registry))
            .map(|s| s.name.clone())
    }

    /// Static check, compile and dynamic validation against the current
    /// registry.
    fn accept(
        &mut self,
        source: &str,
        provenance: Provenance,
        seed_id: &str,
        start: &SessionSnapshot,
        source_id: &str,
        report: &mut ExplorationReport,
    ) -> Option<Accepted> {
        let findings = validate_static(source, self.registry, ActionRegistry::standard());
        if !findings.is_empty() {
            let reason = findings.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ");
            report.reject(source_id, Stage::Static, None, reason);
            return None;
        }
        let skill = match Skill::compile(source, provenance, self.registry) {
            Ok(s) => s,
            Err(e) => {
                report.reject(source_id, Stage::Compile, None, e.to_string());
                return None;
            }
        };
        if let Some(other) = self.duplicate_of(&skill) {
            report.reject(source_id, Stage::Duplicate, Some(&skill.name), format!("same program as `{other}`"));
            return None;
        }
        let outcome = validate_dynamic(&skill, self.registry, seed_id, start, self.planner);
        if !outcome.passed() {
            let why = outcome.verdict.as_ref().map(|v| v.rationale.clone()).unwrap_or_default();
            report.reject(source_id, Stage::Dynamic, Some(&skill.name), why);
            return None;
        }
        Some(Accepted { skill, outcome })
    }

    fn register(&mut self, acc: &Accepted, source_id: &str, report: &mut ExplorationReport) -> Option<SkillEntry> {
        match self.registry.register_source(&acc.skill.source, acc.skill.provenance) {
            Ok(s) => {
                report.log.push(format!("{source_id}: registered `{}` ({})", s.name, s.kind.label()));
                Some(SkillEntry::new(s, source_id, &acc.outcome))
            }
            Err(e) => {
                report.reject(source_id, Stage::Register, Some(&acc.skill.name), e.to_string());
                None
            }
        }
    }

    /// Turns one segment into zero, one or two registered skills.
    pub fn process(
        &mut self,
        rec: &Recording,
        seg: &Segment,
        title: Option<&str>,
        source_id: &str,
        report: &mut ExplorationReport,
    ) {
        let origin = rec.trajectory.origin;
        let seed_id = rec.trajectory.seed_id.clone();
        let start = &rec.snapshots[seg.records.start];
        let records = rec.trajectory.records[seg.records.clone()].to_vec();
        report.segments += 1;

        let summary = match self.planner.summarize_trajectory(QueryContext {
            origin: Some(origin),
            title: title.map(str::to_string),
            trajectory: records.clone(),
            change_set: Some(seg.change_set.clone()),
            ..Default::default()
        }) {
            Ok(s) => s,
            Err(e) => {
                report.reject(source_id, Stage::Summarize, None, e.to_string());
                return;
            }
        };

        let mut query = vec![summary.summary.clone()];
        query.extend(records.iter().map(|r| r.invocation.target.clone()));
        let candidates: Vec<Candidate> = self
            .registry
            .find_reusable(&query)
            .into_iter()
            .filter(|s| s.hierarchy >= 2)
            .map(|s| Candidate::from_skill(s, self.registry))
            .collect();
        let source = match self.planner.generate_skill_code(QueryContext {
            origin: Some(origin),
            title: title.map(str::to_string),
            summary: Some(summary),
            trajectory: records,
            change_set: Some(seg.change_set.clone()),
            candidates,
            existing_names: self.registry.names().to_vec(),
            ..Default::default()
        }) {
            Ok(s) => s,
            Err(e) => {
                report.reject(source_id, Stage::Generate, None, e.to_string());
                return;
            }
        };

        let Some(ui) = self.accept(&source, provenance_of(origin), &seed_id, start, source_id, report) else {
            return;
        };
        let api = if ui.skill.kind.is_api() || self.api_docs.is_empty() {
            None
        } else {
            self.translate(&ui, &seed_id, start, source_id, report)
        };

        let Some(api) = api else {
            if let Some(entry) = self.register(&ui, source_id, report) {
                report.skills.push(entry);
            }
            return;
        };

        let taken: BTreeSet<String> = self.registry.names().iter().cloned().collect();
        let ui = if api.skill.name == ui.skill.name {
            let renamed = unique_name(&format!("{}_ui", ui.skill.name), &taken);
            match rename_source(&ui.skill.source, &renamed)
                .map_err(|e| e.to_string())
                .and_then(|src| Skill::compile(&src, ui.skill.provenance, self.registry).map_err(|e| e.to_string()))
            {
                Ok(skill) => Accepted { skill, ..ui },
                Err(e) => {
                    report.reject(source_id, Stage::Translate, Some(&ui.skill.name), e);
                    return;
                }
            }
        } else {
            ui
        };
        let Some(ui_entry) = self.register(&ui, source_id, report) else {
            return;
        };
        let ui_name = ui_entry.name.clone();
        report.skills.push(ui_entry);
        if let Some(mut entry) = self.register(&api, source_id, report) {
            entry.translated_from = Some(ui_name);
            report.skills.push(entry);
        }
    }

    /// Translates an accepted UI skill and validates the result. Returns
    /// `None` when nothing translates or any check fails; the UI skill is
    /// then kept on its own.
    fn translate(
        &mut self,
        ui: &Accepted,
        seed_id: &str,
        start: &SessionSnapshot,
        source_id: &str,
        report: &mut ExplorationReport,
    ) -> Option<Accepted> {
        let candidates: Vec<Candidate> = self
            .registry
            .iter()
            .map(|s| Candidate::from_skill(s, self.registry))
            .collect();
        let translated = match self.planner.translate_to_api(QueryContext {
            skill_source: Some(ui.skill.source.clone()),
            api_docs: self.api_docs.to_vec(),
            candidates,
            ..Default::default()
        }) {
            Ok(s) => s,
            Err(e) => {
                report.log.push(format!("{source_id}: `{}` not translated: {e}", ui.skill.name));
                return None;
            }
        };
        if translated == ui.skill.source {
            return None;
        }
        let probe = match Skill::compile(&translated, Provenance::Translated, self.registry) {
            Ok(s) => s,
            Err(e) => {
                report.reject(source_id, Stage::Translate, Some(&ui.skill.name), e.to_string());
                return None;
            }
        };
        let mut taken: BTreeSet<String> = self.registry.names().iter().cloned().collect();
        if probe.kind == SkillKind::Hybrid {
            taken.insert(ui.skill.name.clone());
        }
        let name = unique_name(&probe.name, &taken);
        let translated = if name == probe.name {
            translated
        } else {
            match rename_source(&translated, &name) {
                Ok(s) => s,
                Err(e) => {
                    report.reject(source_id, Stage::Translate, Some(&ui.skill.name), e);
                    return None;
                }
            }
        };

        let before = example_digest(&ui.skill.source, ui.skill.provenance, self.registry, seed_id, start);
        let after = example_digest(&translated, Provenance::Translated, self.registry, seed_id, start);
        match (before, after) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => {
                report.reject(source_id, Stage::Translate, Some(&name), "translation changes the document differently");
                return None;
            }
            (Err(e), _) | (_, Err(e)) => {
                report.reject(source_id, Stage::Translate, Some(&name), format!("behaviour check: {e}"));
                return None;
            }
        }
        self.accept(&translated, Provenance::Translated, seed_id, start, source_id, report)
    }
}
