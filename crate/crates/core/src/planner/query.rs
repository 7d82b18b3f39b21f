use serde::{Deserialize, Serialize};

use crate::env::{AppState, ChangeSet, ControlView, DocumentModel, EnvState};
use crate::exec::{ActionKind, ActionRegistry, Args, SkillInvocation};
use crate::explore::{EquivalenceEntry, Origin, TrajectoryRecord};
use crate::skill::ast::{Param, Statement};
use crate::skill::{parse_invocation, parse_syntax, Skill, SkillRegistry};
use crate::validate::Checker;

use super::instruction::Instruction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Follow,
    Explore,
    Summarize,
    Generate,
    Translate,
    ProposeTask,
    Judge,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Follow => "follow",
            Role::Explore => "explore",
            Role::Summarize => "summarize",
            Role::Generate => "generate",
            Role::Translate => "translate",
            Role::ProposeTask => "propose_task",
            Role::Judge => "judge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_response_bytes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_response_bytes: 64 * 1024,
        }
    }
}

/// What the agent sees of the application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub active_tab: String,
    pub open_menu: Option<String>,
    pub controls: Vec<ControlView>,
    pub document: DocumentModel,
    pub app: AppState,
}

impl From<&EnvState> for Observation {
    fn from(s: &EnvState) -> Self {
        Self {
            active_tab: s.active_tab.clone(),
            open_menu: s.open_menu.clone(),
            controls: s.controls.clone(),
            document: s.document.clone(),
            app: s.app.clone(),
        }
    }
}

impl Observation {
    pub fn visible_named(&self, name: &str) -> Vec<&ControlView> {
        self.controls.iter().filter(|c| c.control_name == name).collect()
    }
}

/// An action or skill the agent may choose. `kind` is a display label
/// ("UI action", "API action" or a skill kind).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub name: String,
    pub kind: String,
    pub api: bool,
    pub description: String,
    pub params: Vec<Param>,
    pub hierarchy: u32,
    /// Flattened body in terms of this candidate's own params. Empty for
    /// plain actions.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub leaves: Vec<Statement>,
}

impl Candidate {
    pub fn from_action(name: &str) -> Option<Candidate> {
        let sig = ActionRegistry::standard().get(name)?;
        let mut params: Vec<Param> = sig
            .required_args
            .iter()
            .map(|a| Param {
                key: a.key.clone(),
                ty: a.ty,
                optional: false,
                description: String::new(),
            })
            .collect();
        params.extend(sig.optional_args.iter().map(|a| Param {
            key: a.key.clone(),
            ty: a.ty,
            optional: true,
            description: String::new(),
        }));
        Some(Candidate {
            name: sig.name.clone(),
            kind: match sig.kind {
                ActionKind::Ui => "UI action".into(),
                ActionKind::Api => "API action".into(),
            },
            api: sig.kind == ActionKind::Api,
            description: sig.description.clone(),
            params,
            hierarchy: 1,
            leaves: Vec::new(),
        })
    }

    pub fn from_skill(skill: &Skill, registry: &SkillRegistry) -> Candidate {
        Candidate {
            name: skill.name.clone(),
            kind: skill.kind.label().into(),
            api: skill.kind.is_api(),
            description: skill.description.clone(),
            params: skill.params.clone(),
            hierarchy: skill.hierarchy,
            leaves: crate::skill::classify::flatten(&skill.code, registry).unwrap_or_default(),
        }
    }

    /// The six basic actions.
    pub fn basic() -> Vec<Candidate> {
        crate::exec::BASIC_ACTIONS
            .iter()
            .filter_map(|n| Candidate::from_action(n))
            .collect()
    }

    /// Checks an argument map against the candidate's params.
    pub fn check(&self, args: &Args) -> Result<(), String> {
        for p in &self.params {
            match args.get(&p.key) {
                None if !p.optional => return Err(format!("{}: missing `{}`", self.name, p.key)),
                Some(v) if v.arg_type() != p.ty => {
                    return Err(format!("{}: `{}` expects {}, got {}", self.name, p.key, p.ty, v.arg_type()))
                }
                _ => {}
            }
        }
        match args.keys().find(|k| !self.params.iter().any(|p| &p.key == *k)) {
            Some(k) => Err(format!("{}: unexpected argument `{k}`", self.name)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    UiOnly,
    ApiFirst,
}

impl Policy {
    pub fn as_str(self) -> &'static str {
        match self {
            Policy::UiOnly => "ui_only",
            Policy::ApiFirst => "api_first",
        }
    }

    pub fn parse(s: &str) -> Option<Policy> {
        match s {
            "ui_only" => Some(Policy::UiOnly),
            "api_first" => Some(Policy::ApiFirst),
            _ => None,
        }
    }
}

/// Task-execution state handed to the follow role by the bench runner.
/// `cursor` is opaque to the runner: it echoes back whatever the previous
/// choice returned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskContext {
    pub policy: Policy,
    pub description: String,
    pub ui_steps: Vec<String>,
    pub cursor: usize,
}

/// A control the explorer may target, with the steps that reveal it from
/// any state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploreTarget {
    pub control_id: String,
    pub control_name: String,
    pub depth: usize,
    pub order: usize,
    /// Instructions that navigate to the control, tab first.
    pub reveal: Vec<String>,
    /// The instruction that exercises the control.
    pub action: String,
    /// Edit values to draw from; empty for clicks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<String>,
    /// Active tab and open menu once revealed.
    pub tab: Option<String>,
    pub menu: Option<String>,
}

impl ExploreTarget {
    /// Coverage key in a content mode. Ribbon-level targets ignore the UI
    /// mode since they are reachable from anywhere.
    pub fn coverage_key(&self, content_mode: &str) -> CoverageKey {
        let mode = if self.depth <= 1 {
            format!("*|-|{content_mode}")
        } else {
            format!(
                "{}|{}|{content_mode}",
                self.tab.as_deref().unwrap_or("-"),
                self.menu.as_deref().unwrap_or("-")
            )
        };
        CoverageKey {
            control_id: self.control_id.clone(),
            mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoverageKey {
    pub control_id: String,
    pub mode: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorerContext {
    pub rng_seed: u64,
    pub step: usize,
    pub max_steps: usize,
    /// Content part of the env mode (selection kind and similar).
    pub content_mode: String,
    pub targets: Vec<ExploreTarget>,
    pub coverage: Vec<CoverageKey>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogicStep {
    pub index: usize,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillSummary {
    pub summary: String,
    pub steps: Vec<LogicStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskProposal {
    pub task: String,
    pub invocation: String,
    pub checker: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub success: bool,
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionChoice {
    pub target: String,
    #[serde(default)]
    pub args: Args,
    /// Opaque progress marker echoed back on the next query.
    #[serde(default)]
    pub cursor: usize,
}

impl ActionChoice {
    pub fn invocation(&self) -> SkillInvocation {
        SkillInvocation {
            target: self.target.clone(),
            args: self.args.clone(),
        }
    }
}

/// Everything a role may observe. Which fields each role requires is
/// checked by [`PlannerQuery::check`]:
///
/// | role         | required                                        |
/// |--------------|-------------------------------------------------|
/// | follow       | observation, candidates, instruction or task    |
/// | explore      | observation, explorer                           |
/// | summarize    | origin (trajectory may be empty)                |
/// | generate     | summary, trajectory, change_set, origin         |
/// | translate    | skill_source, api_docs                          |
/// | propose_task | skill_source                                    |
/// | judge        | observation, checker                            |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct QueryContext {
    pub env_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instruction: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<SkillInvocation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<Observation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<Candidate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trajectory: Vec<TrajectoryRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<Origin>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<SkillSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub change_set: Option<ChangeSet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub existing_names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skill_source: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub api_docs: Vec<EquivalenceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explorer: Option<ExplorerContext>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<TaskContext>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checker: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannerQuery {
    pub role: Role,
    pub context: QueryContext,
    #[serde(default)]
    pub budget: Budget,
}

impl PlannerQuery {
    pub fn new(role: Role, context: QueryContext) -> Self {
        Self {
            role,
            context,
            budget: Budget::default(),
        }
    }

    /// Enforces the role/field matrix.
    pub fn check(&self) -> Result<(), String> {
        let c = &self.context;
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(format!("{} query lacks {what}", self.role.as_str()))
            }
        };
        match self.role {
            Role::Follow => {
                need(c.observation.is_some(), "an observation")?;
                need(!c.candidates.is_empty(), "candidates")?;
                need(c.instruction.is_some() || c.task.is_some(), "an instruction or task")
            }
            Role::Explore => {
                need(c.observation.is_some(), "an observation")?;
                need(c.explorer.is_some(), "explorer state")
            }
            Role::Summarize => need(c.origin.is_some(), "an origin"),
            Role::Generate => {
                need(c.summary.is_some(), "a summary")?;
                need(c.change_set.is_some(), "a change set")?;
                need(c.origin.is_some(), "an origin")
            }
            Role::Translate => {
                need(c.skill_source.is_some(), "skill source")?;
                need(!c.api_docs.is_empty(), "api docs")
            }
            Role::ProposeTask => need(c.skill_source.is_some(), "skill source"),
            Role::Judge => {
                need(c.observation.is_some(), "an observation")?;
                need(c.checker.is_some(), "a checker")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PlannerResponse {
    Action(ActionChoice),
    Done,
    Instruction {
        steps: Vec<String>,
        /// Explore target id the instruction exercises, when known.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<String>,
    },
    Stop,
    Summary(SkillSummary),
    Source { source: String },
    Task(TaskProposal),
    Verdict(Verdict),
}

impl PlannerResponse {
    fn kind(&self) -> &'static str {
        match self {
            PlannerResponse::Action(_) => "action",
            PlannerResponse::Done => "done",
            PlannerResponse::Instruction { .. } => "instruction",
            PlannerResponse::Stop => "stop",
            PlannerResponse::Summary(_) => "summary",
            PlannerResponse::Source { .. } => "source",
            PlannerResponse::Task(_) => "task",
            PlannerResponse::Verdict(_) => "verdict",
        }
    }

    /// Schema check of the payload against the query that produced it.
    pub fn validate(&self, query: &PlannerQuery) -> Result<(), String> {
        let size = serde_json::to_string(self).map(|s| s.len()).unwrap_or(usize::MAX);
        if size > query.budget.max_response_bytes {
            return Err(format!(
                "response of {size} bytes exceeds budget {}",
                query.budget.max_response_bytes
            ));
        }
        let c = &query.context;
        match (query.role, self) {
            (Role::Follow, PlannerResponse::Done) => Ok(()),
            (Role::Follow, PlannerResponse::Action(choice)) => {
                let cand = c
                    .candidates
                    .iter()
                    .find(|k| k.name == choice.target)
                    .ok_or_else(|| format!("`{}` is not among the candidates", choice.target))?;
                cand.check(&choice.args)
            }
            (Role::Explore, PlannerResponse::Stop) => Ok(()),
            (Role::Explore, PlannerResponse::Instruction { steps, target }) => {
                if steps.is_empty() {
                    return Err("empty instruction".into());
                }
                if let (Some(t), Some(ex)) = (target, &c.explorer) {
                    if !ex.targets.iter().any(|x| &x.control_id == t) {
                        return Err(format!("unknown explore target `{t}`"));
                    }
                }
                steps.iter().try_for_each(|s| Instruction::parse(s).map(|_| ()))
            }
            (Role::Summarize, PlannerResponse::Summary(s)) => {
                if s.steps.is_empty() {
                    return Err("summary has no logic steps".into());
                }
                let mut last = None;
                for st in &s.steps {
                    if st.index >= c.trajectory.len() {
                        return Err(format!("logic step references record {} of {}", st.index, c.trajectory.len()));
                    }
                    if last.is_some_and(|l| l >= st.index) {
                        return Err("logic steps are out of order".into());
                    }
                    last = Some(st.index);
                }
                Ok(())
            }
            (Role::Generate | Role::Translate, PlannerResponse::Source { source }) => parse_syntax(source)
                .map(|_| ())
                .map_err(|d| d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")),
            (Role::ProposeTask, PlannerResponse::Task(t)) => {
                parse_invocation(&t.invocation).map_err(|d| d.to_string())?;
                Checker::parse(&t.checker).map(|_| ()).map_err(|e| e.to_string())
            }
            (Role::Judge, PlannerResponse::Verdict(_)) => Ok(()),
            (role, other) => Err(format!("a {} query cannot be answered with `{}`", role.as_str(), other.kind())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Value;

    fn follow_query() -> PlannerQuery {
        PlannerQuery::new(
            Role::Follow,
            QueryContext {
                instruction: Some("click Bold".into()),
                candidates: Candidate::basic(),
                ..Default::default()
            },
        )
    }

    #[test]
    fn off_list_choice_is_rejected() {
        let q = follow_query();
        let bad = PlannerResponse::Action(ActionChoice {
            target: "tables_add".into(),
            args: Args::new(),
            cursor: 0,
        });
        assert!(bad.validate(&q).unwrap_err().contains("not among"));
        let mut args = Args::new();
        args.insert("control_name".into(), Value::from("Bold"));
        let ok = PlannerResponse::Action(ActionChoice {
            target: "click_input".into(),
            args,
            cursor: 0,
        });
        assert!(ok.validate(&q).is_ok());
        assert!(PlannerResponse::Stop.validate(&q).is_err());
    }

    #[test]
    fn role_matrix() {
        assert!(follow_query().check().unwrap_err().contains("observation"));
        let q = PlannerQuery::new(Role::Translate, QueryContext::default());
        assert!(q.check().is_err());
    }

    #[test]
    fn response_wire_format() {
        let r: PlannerResponse = serde_json::from_str(r#"{"type":"instruction","steps":["click Insert tab"]}"#).unwrap();
        assert_eq!(
            r,
            PlannerResponse::Instruction {
                steps: vec!["click Insert tab".into()],
                target: None,
            }
        );
        assert!(serde_json::from_str::<PlannerResponse>(r#"{"type":"verdict","success":"yes"}"#).is_err());
    }

    #[test]
    fn oversized_response_is_rejected() {
        let mut q = PlannerQuery::new(Role::Judge, QueryContext::default());
        q.budget.max_response_bytes = 10;
        let v = PlannerResponse::Verdict(Verdict {
            success: true,
            rationale: "long enough to overflow".into(),
        });
        assert!(v.validate(&q).unwrap_err().contains("budget"));
    }
}
