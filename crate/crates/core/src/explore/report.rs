//! Exploration output: registered skills, rejections and coverage.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::skill::{Provenance, Skill, SkillKind};
use crate::validate::DynamicOutcome;

use super::trajectory::Origin;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillEntry {
    pub name: String,
    pub kind: SkillKind,
    pub hierarchy: u32,
    pub provenance: Provenance,
    /// Help-document id or seed id the skill came from.
    pub source_id: String,
    pub validation: ValidationSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translated_from: Option<String>,
}

impl SkillEntry {
    pub fn new(skill: &Skill, source_id: &str, outcome: &DynamicOutcome) -> Self {
        Self {
            name: skill.name.clone(),
            kind: skill.kind,
            hierarchy: skill.hierarchy,
            provenance: skill.provenance,
            source_id: source_id.to_string(),
            validation: ValidationSummary::from(outcome),
            translated_from: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub task: String,
    pub invocation: String,
    pub checker: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub judge_disagreed: bool,
}

impl From<&DynamicOutcome> for ValidationSummary {
    fn from(o: &DynamicOutcome) -> Self {
        Self {
            task: o.proposed_task.clone(),
            invocation: o.invocation.clone(),
            checker: o.checker.clone(),
            passed: o.passed(),
            judge_disagreed: o.disagreement,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Summarize,
    Generate,
    Static,
    Compile,
    Duplicate,
    Dynamic,
    Translate,
    Register,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub source_id: String,
    pub stage: Stage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skill: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageEntry {
    pub seed_id: String,
    pub control_id: String,
    pub control_name: String,
    pub mode: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationReport {
    pub origin: Origin,
    pub sources: Vec<String>,
    pub skills: Vec<SkillEntry>,
    pub rejections: Vec<Rejection>,
    pub coverage: Vec<CoverageEntry>,
    pub counts_by_hierarchy: BTreeMap<u32, usize>,
    pub counts_by_kind: BTreeMap<String, usize>,
    /// Sources whose run was aborted by the planner.
    pub incomplete: Vec<String>,
    pub instructions: usize,
    pub actions: usize,
    pub segments: usize,
    pub planner_calls: usize,
    pub log: Vec<String>,
}

impl ExplorationReport {
    pub fn new(origin: Origin) -> Self {
        Self {
            origin,
            sources: Vec::new(),
            skills: Vec::new(),
            rejections: Vec::new(),
            coverage: Vec::new(),
            counts_by_hierarchy: BTreeMap::new(),
            counts_by_kind: BTreeMap::new(),
            incomplete: Vec::new(),
            instructions: 0,
            actions: 0,
            segments: 0,
            planner_calls: 0,
            log: Vec::new(),
        }
    }

    pub fn reject(&mut self, source_id: &str, stage: Stage, skill: Option<&str>, reason: impl Into<String>) {
        let reason = reason.into();
        self.log.push(format!("{source_id}: rejected at {stage:?}: {reason}"));
        self.rejections.push(Rejection {
            source_id: source_id.to_string(),
            stage,
            skill: skill.map(str::to_string),
            reason,
        });
    }

    /// Recomputes the per-hierarchy and per-kind counts.
    pub fn recount(&mut self) {
        self.counts_by_hierarchy.clear();
        self.counts_by_kind.clear();
        for s in &self.skills {
            *self.counts_by_hierarchy.entry(s.hierarchy).or_default() += 1;
            *self.counts_by_kind.entry(s.kind.label().to_string()).or_default() += 1;
        }
    }

    pub fn merge(&mut self, other: ExplorationReport) {
        self.sources.extend(other.sources);
        self.skills.extend(other.skills);
        self.rejections.extend(other.rejections);
        self.coverage.extend(other.coverage);
        self.incomplete.extend(other.incomplete);
        self.instructions += other.instructions;
        self.actions += other.actions;
        self.segments += other.segments;
        self.planner_calls += other.planner_calls;
        self.log.extend(other.log);
        self.recount();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let origin = match self.origin {
            Origin::Follower => "follower",
            Origin::Explorer => "explorer",
        };
        let _ = writeln!(
            out,
            "{origin} exploration over {} source(s): {} instruction(s), {} action(s), {} segment(s), {} planner call(s)",
            self.sources.len(),
            self.instructions,
            self.actions,
            self.segments,
            self.planner_calls
        );
        let _ = writeln!(out, "skills: {}", self.skills.len());
        for s in &self.skills {
            let from = s
                .translated_from
                .as_deref()
                .map(|f| format!(" (from {f})"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "  {:<32} {:<13} h={} {:?} [{}]{from}",
                s.name,
                s.kind.label(),
                s.hierarchy,
                s.provenance,
                s.source_id
            );
        }
        for (h, n) in &self.counts_by_hierarchy {
            let _ = writeln!(out, "hierarchy {h}: {n}");
        }
        if !self.coverage.is_empty() {
            let _ = writeln!(out, "coverage entries: {}", self.coverage.len());
        }
        if !self.rejections.is_empty() {
            let _ = writeln!(out, "rejections: {}", self.rejections.len());
            for r in &self.rejections {
                let _ = writeln!(out, "  [{}] {:?}: {}", r.source_id, r.stage, r.reason);
            }
        }
        if !self.incomplete.is_empty() {
            let _ = writeln!(out, "incomplete: {}", self.incomplete.join(", "));
        }
        out
    }
}
