//! Follower-driven exploration: replay help-document scripts, then mine
//! the recorded trajectories for skills.

use std::collections::BTreeMap;

use crate::env::SeedFile;
use crate::planner::{Candidate, Planner};
use crate::skill::SkillRegistry;

use super::breakpoints::{place_breakpoints, Recorder, StepOutcome};
use super::equivalence::EquivalenceEntry;
use super::helpdoc::HelpDocScript;
use super::pipeline::Pipeline;
use super::report::ExplorationReport;
use super::trajectory::Origin;

/// Follows one script on `seed`. The whole script is a single instruction,
/// so a failed step abandons it and an aborted planner leaves the report
/// marked incomplete without skills.
pub fn follow_document(
    seed: &SeedFile,
    script: &HelpDocScript,
    planner: &mut Planner,
    registry: &mut SkillRegistry,
    api_docs: &[EquivalenceEntry],
) -> ExplorationReport {
    let calls_before = planner.meter().calls;
    let mut report = ExplorationReport::new(Origin::Follower);
    report.sources.push(script.id.clone());
    report.instructions = 1;
    let mut recorder = match Recorder::new(seed, Origin::Follower) {
        Ok(r) => r,
        Err(e) => {
            report.incomplete.push(script.id.clone());
            report.log.push(format!("{}: cannot load seed: {e}", script.id));
            return report;
        }
    };
    let candidates = Candidate::basic();
    for step in &script.steps {
        match recorder.run_step(planner, 0, step, &candidates) {
            StepOutcome::Done { .. } => {}
            StepOutcome::Failed { message } => {
                report.log.push(format!("{}: step `{step}` failed: {message}", script.id));
                break;
            }
            StepOutcome::Aborted(e) => {
                report.incomplete.push(script.id.clone());
                report.log.push(format!("{}: planner aborted at `{step}`: {e}", script.id));
                report.actions = recorder.recording().trajectory.records.len();
                report.planner_calls = planner.meter().calls - calls_before;
                return report;
            }
        }
    }
    let recording = recorder.into_recording();
    report.actions = recording.trajectory.records.len();
    let segments = place_breakpoints(&recording);
    let mut pipeline = Pipeline {
        planner,
        registry,
        api_docs,
    };
    for seg in &segments {
        pipeline.process(&recording, seg, Some(&script.title), &script.id, &mut report);
    }
    report.planner_calls = pipeline.planner.meter().calls - calls_before;
    report.recount();
    report
}

/// Follows every script in order against its target seed.
pub fn follow_corpus(
    seeds: &BTreeMap<String, SeedFile>,
    scripts: &[HelpDocScript],
    planner: &mut Planner,
    registry: &mut SkillRegistry,
    api_docs: &[EquivalenceEntry],
) -> ExplorationReport {
    let mut report = ExplorationReport::new(Origin::Follower);
    for script in scripts {
        match seeds.get(&script.target_seed) {
            Some(seed) => report.merge(follow_document(seed, script, planner, registry, api_docs)),
            None => {
                report.sources.push(script.id.clone());
                report.incomplete.push(script.id.clone());
                report.log.push(format!("{}: unknown seed `{}`", script.id, script.target_seed));
            }
        }
    }
    report
}
