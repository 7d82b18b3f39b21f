//! Planner-driven task execution under the two candidate policies.

use serde::{Deserialize, Serialize};

use crate::env::{EnvSession, SeedFile};
use crate::exec::EntryKind;
use crate::explore::EquivalenceEntry;
use crate::planner::{Candidate, Planner, Policy, QueryContext, TaskContext};
use crate::skill::{SkillKind, SkillRegistry};
use crate::validate::Checker;

use super::task::TaskSpec;

/// Selection actions are offered to the UI-only agent too: the simulator
/// has no mouse-drag selection, so without them text-targeted tasks would
/// be unreachable for it.
const SELECTION_ACTIONS: &[&str] = &["select_text", "select_table"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub step_cap: usize,
    /// Simulated seconds charged per planner call.
    pub tau_call: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            step_cap: 20,
            tau_call: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub task_id: String,
    pub policy: Policy,
    pub success: bool,
    pub steps: usize,
    pub ui_actions: usize,
    pub api_actions: usize,
    pub advanced_api_actions: usize,
    pub sim_time: f64,
    pub planner_calls: usize,
    pub cost_units: f64,
    pub final_digest: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub log: Vec<String>,
}

/// Candidates offered under `policy`. API-first lists API skills first,
/// then by descending hierarchy and name.
pub fn policy_candidates(policy: Policy, registry: &SkillRegistry) -> Vec<Candidate> {
    let mut skills: Vec<_> = match policy {
        Policy::UiOnly => registry
            .iter()
            .filter(|s| s.kind == SkillKind::AtomicUi || SELECTION_ACTIONS.contains(&s.name.as_str()))
            .collect(),
        Policy::ApiFirst => registry.iter().collect(),
    };
    if policy == Policy::ApiFirst {
        skills.sort_by(|a, b| {
            b.kind
                .is_api()
                .cmp(&a.kind.is_api())
                .then(b.hierarchy.cmp(&a.hierarchy))
                .then(a.name.cmp(&b.name))
        });
    }
    skills.into_iter().map(|s| Candidate::from_skill(s, registry)).collect()
}

/// Runs one task. Terminates on checker success, planner `done`, a planner
/// error, or the step cap; the checker decides success.
pub fn run_task(
    task: &TaskSpec,
    seed: &SeedFile,
    policy: Policy,
    planner: &mut Planner,
    registry: &SkillRegistry,
    api_docs: &[EquivalenceEntry],
    options: RunOptions,
) -> Result<RunMetrics, String> {
    let checker = Checker::parse(&task.checker).map_err(|e| format!("task `{}`: {e}", task.id))?;
    let mut session = EnvSession::load(seed).map_err(|e| e.to_string())?.without_xml();
    let candidates = policy_candidates(policy, registry);
    let (calls_before, cost_before) = (planner.meter().calls, planner.meter().cost_units());
    let mut m = RunMetrics {
        task_id: task.id.clone(),
        policy,
        success: false,
        steps: 0,
        ui_actions: 0,
        api_actions: 0,
        advanced_api_actions: 0,
        sim_time: 0.0,
        planner_calls: 0,
        cost_units: 0.0,
        final_digest: String::new(),
        log: Vec::new(),
    };
    let mut cursor = 0;
    while !checker.eval(session.document(), session.app()) && m.steps < options.step_cap {
        let state = session.state();
        let ctx = QueryContext {
            env_digest: state.digest(),
            observation: Some((&state).into()),
            candidates: candidates.clone(),
            task: Some(TaskContext {
                policy,
                description: task.description.clone(),
                ui_steps: task.ui_steps.clone(),
                cursor,
            }),
            api_docs: api_docs.to_vec(),
            ..Default::default()
        };
        let choice = match planner.next_action(ctx) {
            Ok(Some(c)) => c,
            Ok(None) => break,
            Err(e) => {
                m.log.push(format!("planner: {e}"));
                break;
            }
        };
        m.steps += 1;
        cursor = choice.cursor;
        let inv = choice.invocation();
        match session.step(registry, &inv) {
            Ok(r) => {
                m.ui_actions += r.trace.ui_actions;
                m.api_actions += r.trace.api_actions;
                m.advanced_api_actions += r
                    .trace
                    .entries
                    .iter()
                    .filter(|e| e.kind == EntryKind::Skill && e.depth == 0)
                    .filter_map(|e| registry.get(&e.target))
                    .filter(|s| s.kind.is_api() && s.hierarchy >= 2)
                    .count();
                if !r.ok {
                    m.log.push(format!("{}: {}", inv.render(), r.message));
                }
            }
            Err(e) => m.log.push(format!("{}: {e}", inv.render())),
        }
    }
    m.success = checker.eval(session.document(), session.app());
    if !m.success && m.steps >= options.step_cap {
        m.log.push(format!("step cap {} reached", options.step_cap));
    }
    m.planner_calls = planner.meter().calls - calls_before;
    m.cost_units = planner.meter().cost_units() - cost_before;
    m.sim_time = session.clock() + m.planner_calls as f64 * options.tau_call;
    m.final_digest = session.state().content_digest();
    Ok(m)
}
