//! Deterministic backend: a pure function of (query, seed).

use std::collections::{BTreeMap, BTreeSet};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::canonical::sha256_hex;
use crate::env::ControlType;
use crate::exec::{Args, SkillInvocation, Value};
use crate::explore::generate::{generate_source, summary_text, GenerateInput};
use crate::explore::reuse::{literal_args, unify};
use crate::explore::translate::{rewrite, translate_source};
use crate::explore::Origin;
use crate::skill::ast::{Arg, Expr, Statement};
use crate::skill::{parse_doc, parse_invocation, parse_syntax};
use crate::validate::Checker;

use super::instruction::Instruction;
use super::query::{
    ActionChoice, Candidate, ExploreTarget, LogicStep, Observation, PlannerQuery, PlannerResponse, Policy,
    QueryContext, Role, SkillSummary, TaskContext, TaskProposal, Verdict,
};
use super::{BackendError, PlannerBackend};

#[derive(Debug, Clone)]
pub struct ScriptedPlanner {
    seed: u64,
}

impl ScriptedPlanner {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }
}

fn protocol(msg: impl Into<String>) -> BackendError {
    BackendError::Protocol(msg.into())
}

fn lit(s: &str) -> Expr {
    Expr::Lit(Value::from(s))
}

fn arg(key: &str, value: Expr) -> Arg {
    Arg {
        key: key.to_string(),
        value,
    }
}

fn inv(target: &str, args: &[(&str, Value)]) -> SkillInvocation {
    SkillInvocation::new(target, args.iter().cloned().map(|(k, v)| (k.to_string(), v)))
}

/// True when the instruction is a click on the tab that is already active.
fn is_active_tab_click(instr: &Instruction, obs: &Observation) -> bool {
    match instr {
        Instruction::Click { name, tab: true } => obs.active_tab == *name && obs.open_menu.is_none(),
        _ => false,
    }
}

/// Maps an instruction onto one basic action given what is visible.
pub fn map_instruction(instr: &Instruction, obs: &Observation) -> Result<SkillInvocation, String> {
    let s = |t: &str| Value::from(t);
    let unique = |name: &str| -> Result<(), String> {
        match obs.visible_named(name).len() {
            1 => Ok(()),
            0 => Err(format!("no visible control named `{name}`")),
            n => Err(format!("{n} visible controls are named `{name}`")),
        }
    };
    Ok(match instr {
        Instruction::Click { name, .. } => {
            unique(name)?;
            inv("click_input", &[("control_name", s(name))])
        }
        Instruction::Type { text } => {
            let edit = obs.open_menu.as_ref().and_then(|menu| {
                obs.controls
                    .iter()
                    .find(|c| c.parent_id.as_ref() == Some(menu) && c.control_type.is_editable())
            });
            match edit {
                Some(c) => inv("set_edit_text", &[("control_name", s(&c.control_name)), ("text", s(text))]),
                None => inv("type_keys", &[("text", s(text))]),
            }
        }
        Instruction::TypeInto { text, name } => {
            unique(name)?;
            inv("type_keys", &[("text", s(text)), ("control_name", s(name))])
        }
        Instruction::Set { name, value } => {
            unique(name)?;
            inv("set_edit_text", &[("control_name", s(name)), ("text", s(value))])
        }
        Instruction::SelectText { text } => inv("select_text", &[("text", s(text))]),
        Instruction::SelectTable { number } => inv("select_table", &[("number", Value::from(*number as f64))]),
        Instruction::Press { chord } => inv("type_keys", &[("text", s(chord))]),
        Instruction::Scroll { dist } => inv(
            "wheel_mouse_input",
            &[("wheel_dist", Value::from(*dist as f64)), ("control_name", s("Document"))],
        ),
    })
}

/// Observation-free mapping used to plan a whole task up front.
pub fn static_statement(instr: &Instruction) -> Statement {
    let call = |t: &str, args: Vec<Arg>| Statement::call(t, args);
    match instr {
        Instruction::Click { name, .. } => call("click_input", vec![arg("control_name", lit(name))]),
        Instruction::Type { text } | Instruction::Press { chord: text } => {
            call("type_keys", vec![arg("text", lit(text))])
        }
        Instruction::TypeInto { text, name } => call(
            "type_keys",
            vec![arg("text", lit(text)), arg("control_name", lit(name))],
        ),
        Instruction::Set { name, value } => call(
            "set_edit_text",
            vec![arg("control_name", lit(name)), arg("text", lit(value))],
        ),
        Instruction::SelectText { text } => call("select_text", vec![arg("text", lit(text))]),
        Instruction::SelectTable { number } => {
            call("select_table", vec![arg("number", Expr::Lit(Value::from(*number as f64)))])
        }
        Instruction::Scroll { dist } => call(
            "wheel_mouse_input",
            vec![arg("wheel_dist", Expr::Lit(Value::from(*dist as f64))), arg("control_name", lit("Document"))],
        ),
    }
}

fn literal_invocation(st: &Statement) -> Option<SkillInvocation> {
    let args = st
        .args
        .iter()
        .flatten()
        .map(|a| match &a.value {
            Expr::Lit(v) => Some((a.key.clone(), v.clone())),
            Expr::Param(_) => None,
        })
        .collect::<Option<Args>>()?;
    Some(SkillInvocation {
        target: st.target.clone(),
        args,
    })
}

/// API-first plan for a task: translate the UI steps through the
/// equivalence entries, then cover the result with the longest-matching
/// candidates (ties by candidate order).
pub fn api_first_plan(ctx: &QueryContext, task: &TaskContext) -> Result<Vec<SkillInvocation>, String> {
    let stmts: Vec<Statement> = task
        .ui_steps
        .iter()
        .map(|s| Instruction::parse(s).map(|i| static_statement(&i)))
        .collect::<Result<_, _>>()?;
    let (stmts, _) = rewrite(&stmts, &ctx.api_docs);
    let mut plan = Vec::new();
    let mut i = 0;
    while i < stmts.len() {
        let mut best: Option<(usize, SkillInvocation)> = None;
        for c in &ctx.candidates {
            let leaves: Vec<Statement> = if c.leaves.is_empty() {
                continue;
            } else {
                c.leaves.clone()
            };
            let Some(binds) = unify(&leaves, &stmts[i..]) else { continue };
            let Some(args) = literal_args(c, &binds) else { continue };
            if c.check(&args).is_err() {
                continue;
            }
            if best.as_ref().is_none_or(|(n, _)| leaves.len() > *n) {
                best = Some((
                    leaves.len(),
                    SkillInvocation {
                        target: c.name.clone(),
                        args,
                    },
                ));
            }
        }
        match best {
            Some((n, invocation)) => {
                plan.push(invocation);
                i += n;
            }
            None => {
                let invocation = literal_invocation(&stmts[i])
                    .filter(|v| ctx.candidates.iter().any(|c| c.name == v.target))
                    .ok_or_else(|| format!("no candidate covers `{}`", stmts[i].target))?;
                plan.push(invocation);
                i += 1;
            }
        }
    }
    Ok(plan)
}

fn is_active_tab_invocation(v: &SkillInvocation, obs: &Observation) -> bool {
    v.target == "click_input"
        && obs.open_menu.is_none()
        && v.args.len() == 1
        && v.args.get("control_name").and_then(Value::as_str).is_some_and(|n| {
            n == obs.active_tab
                && obs
                    .visible_named(n)
                    .iter()
                    .any(|c| c.control_type == ControlType::TabItem)
        })
}

fn choose(target: SkillInvocation, cursor: usize, candidates: &[Candidate]) -> Result<PlannerResponse, BackendError> {
    if !candidates.iter().any(|c| c.name == target.target) {
        return Err(protocol(format!("`{}` is not among the candidates", target.target)));
    }
    Ok(PlannerResponse::Action(ActionChoice {
        target: target.target,
        args: target.args,
        cursor,
    }))
}

fn follow(ctx: &QueryContext) -> Result<PlannerResponse, BackendError> {
    let obs = ctx.observation.as_ref().ok_or_else(|| protocol("no observation"))?;
    if let Some(task) = &ctx.task {
        return follow_task(ctx, task, obs);
    }
    let text = ctx.instruction.as_deref().ok_or_else(|| protocol("no instruction"))?;
    if !ctx.history.is_empty() {
        return Ok(PlannerResponse::Done);
    }
    let instr = Instruction::parse(text).map_err(protocol)?;
    if is_active_tab_click(&instr, obs) {
        return Ok(PlannerResponse::Done);
    }
    let v = map_instruction(&instr, obs).map_err(protocol)?;
    choose(v, 0, &ctx.candidates)
}

fn follow_task(ctx: &QueryContext, task: &TaskContext, obs: &Observation) -> Result<PlannerResponse, BackendError> {
    match task.policy {
        Policy::UiOnly => {
            let mut i = task.cursor;
            while let Some(step) = task.ui_steps.get(i) {
                let instr = Instruction::parse(step).map_err(protocol)?;
                if is_active_tab_click(&instr, obs) {
                    i += 1;
                    continue;
                }
                let v = map_instruction(&instr, obs).map_err(protocol)?;
                return choose(v, i + 1, &ctx.candidates);
            }
            Ok(PlannerResponse::Done)
        }
        Policy::ApiFirst => {
            let plan = api_first_plan(ctx, task).map_err(protocol)?;
            let mut i = task.cursor;
            while let Some(v) = plan.get(i) {
                if is_active_tab_invocation(v, obs) {
                    i += 1;
                    continue;
                }
                return choose(v.clone(), i + 1, &ctx.candidates);
            }
            Ok(PlannerResponse::Done)
        }
    }
}

fn explore_rng(rng_seed: u64, seed: u64, env_digest: &str, step: usize) -> ChaCha8Rng {
    let digest = sha256_hex(format!("{rng_seed}:{seed}:{env_digest}:{step}").as_bytes());
    let mut bytes = [0u8; 32];
    hex::decode_to_slice(&digest, &mut bytes).expect("sha256 hex is 32 bytes");
    ChaCha8Rng::from_seed(bytes)
}

/// Target order for breadth-first selection.
pub fn bfs_order(targets: &[ExploreTarget]) -> Vec<&ExploreTarget> {
    let mut v: Vec<&ExploreTarget> = targets.iter().collect();
    v.sort_by_key(|t| (t.depth, t.order));
    v
}

fn explore(ctx: &QueryContext, seed: u64) -> Result<PlannerResponse, BackendError> {
    let ex = ctx.explorer.as_ref().ok_or_else(|| protocol("no explorer state"))?;
    if ex.step >= ex.max_steps {
        return Ok(PlannerResponse::Stop);
    }
    let covered: BTreeSet<_> = ex.coverage.iter().collect();
    let Some(t) = bfs_order(&ex.targets)
        .into_iter()
        .find(|t| !covered.contains(&t.coverage_key(&ex.content_mode)))
    else {
        return Ok(PlannerResponse::Stop);
    };
    let mut steps = t.reveal.clone();
    let action = if t.values.is_empty() {
        t.action.clone()
    } else {
        let mut rng = explore_rng(ex.rng_seed, seed, &ctx.env_digest, ex.step);
        let v = &t.values[rng.random_range(0..t.values.len())];
        t.action.replace("{value}", v)
    };
    steps.push(action);
    Ok(PlannerResponse::Instruction {
        steps,
        target: Some(t.control_id.clone()),
    })
}

fn summarize(ctx: &QueryContext) -> Result<PlannerResponse, BackendError> {
    let origin = ctx.origin.ok_or_else(|| protocol("no origin"))?;
    if ctx.trajectory.is_empty() {
        return Err(BackendError::NothingToSummarize);
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (pos, r) in ctx.trajectory.iter().enumerate() {
        if r.result.ok {
            groups.entry(r.instruction_id).or_default().push(pos);
        }
    }
    let keep: Vec<usize> = groups
        .into_values()
        .filter(|g| origin == Origin::Follower || g.iter().any(|&p| ctx.trajectory[p].change_set.has_effect()))
        .flatten()
        .collect();
    let mut keep = keep;
    keep.sort_unstable();
    if keep.is_empty() {
        return Err(BackendError::NothingToSummarize);
    }
    let steps = keep
        .into_iter()
        .map(|p| {
            let r = &ctx.trajectory[p];
            LogicStep {
                index: p,
                description: format!("{}: {}", r.instruction, r.invocation.render()),
            }
        })
        .collect();
    Ok(PlannerResponse::Summary(SkillSummary {
        summary: summary_text(origin, ctx.title.as_deref(), ctx.change_set.as_ref()),
        steps,
    }))
}

fn generate(ctx: &QueryContext) -> Result<PlannerResponse, BackendError> {
    let summary = ctx.summary.as_ref().ok_or_else(|| protocol("no summary"))?;
    let change_set = ctx.change_set.as_ref().ok_or_else(|| protocol("no change set"))?;
    let source = generate_source(&GenerateInput {
        origin: ctx.origin.ok_or_else(|| protocol("no origin"))?,
        title: ctx.title.as_deref(),
        summary,
        trajectory: &ctx.trajectory,
        change_set,
        candidates: &ctx.candidates,
        existing_names: &ctx.existing_names,
    })
    .map_err(protocol)?;
    Ok(PlannerResponse::Source { source })
}

fn translate(ctx: &QueryContext) -> Result<PlannerResponse, BackendError> {
    let src = ctx.skill_source.as_deref().ok_or_else(|| protocol("no skill source"))?;
    let t = translate_source(src, &ctx.api_docs, &ctx.candidates).map_err(BackendError::Declined)?;
    Ok(PlannerResponse::Source { source: t.source })
}

fn propose_task(ctx: &QueryContext) -> Result<PlannerResponse, BackendError> {
    let src = ctx.skill_source.as_deref().ok_or_else(|| protocol("no skill source"))?;
    let parsed = parse_syntax(src).map_err(|_| BackendError::Declined("skill source does not parse".into()))?;
    let (description, examples) = parse_doc(&parsed.header.doc);
    let ex = examples
        .first()
        .ok_or_else(|| BackendError::Declined("skill has no usage example".into()))?;
    let checker = ex
        .effect
        .clone()
        .ok_or_else(|| BackendError::Declined("skill declares no effect".into()))?;
    parse_invocation(&ex.invocation).map_err(|d| BackendError::Declined(d.to_string()))?;
    Ok(PlannerResponse::Task(TaskProposal {
        task: description,
        invocation: ex.invocation.clone(),
        checker,
    }))
}

fn judge(ctx: &QueryContext) -> Result<PlannerResponse, BackendError> {
    let src = ctx.checker.as_deref().ok_or_else(|| protocol("no checker"))?;
    let obs = ctx.observation.as_ref().ok_or_else(|| protocol("no observation"))?;
    let checker = Checker::parse(src).map_err(|e| BackendError::Declined(format!("checker: {e}")))?;
    let success = checker.eval(&obs.document, &obs.app);
    Ok(PlannerResponse::Verdict(Verdict {
        success,
        rationale: format!("checker `{src}` {}", if success { "holds" } else { "does not hold" }),
    }))
}

impl PlannerBackend for ScriptedPlanner {
    fn name(&self) -> &str {
        "scripted"
    }

    fn respond(&mut self, query: &PlannerQuery, _prompt: &str) -> Result<PlannerResponse, BackendError> {
        let ctx = &query.context;
        match query.role {
            Role::Follow => follow(ctx),
            Role::Explore => explore(ctx, self.seed),
            Role::Summarize => summarize(ctx),
            Role::Generate => generate(ctx),
            Role::Translate => translate(ctx),
            Role::ProposeTask => propose_task(ctx),
            Role::Judge => judge(ctx),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{ChangeSet, DocumentModel, EnvSession, SeedFile};
    use crate::explore::{RecordResult, TrajectoryRecord};
    use crate::planner::{Planner, PlannerError};

    fn obs_of(s: &EnvSession) -> Observation {
        (&s.state()).into()
    }

    fn empty() -> EnvSession {
        EnvSession::load(&SeedFile::new("empty", DocumentModel::default())).unwrap()
    }

    fn follow_ctx(instr: &str, s: &EnvSession) -> QueryContext {
        QueryContext {
            instruction: Some(instr.into()),
            observation: Some(obs_of(s)),
            candidates: Candidate::basic(),
            ..Default::default()
        }
    }

    #[test]
    fn click_tab_maps_to_click_input() {
        let mut p = Planner::scripted(0);
        let a = p.next_action(follow_ctx("click Insert tab", &empty())).unwrap().unwrap();
        assert_eq!(a.invocation().render(), r#"click_input(control_name: "Insert")"#);
    }

    #[test]
    fn active_tab_is_done() {
        let mut p = Planner::scripted(0);
        assert_eq!(p.next_action(follow_ctx("click Home tab", &empty())).unwrap(), None);
    }

    #[test]
    fn missing_control_is_a_protocol_error() {
        let mut p = Planner::scripted(0);
        let err = p.next_action(follow_ctx("click Ruler", &empty())).unwrap_err();
        assert!(matches!(err, PlannerError::Aborted { .. }), "{err}");
    }

    #[test]
    fn type_targets_the_open_menu_edit() {
        let lib = crate::skill::SkillRegistry::new();
        let mut s = empty();
        for name in ["Insert", "Header"] {
            s.step(&lib, &inv("click_input", &[("control_name", Value::from(name))])).unwrap();
        }
        let mut p = Planner::scripted(0);
        let a = p.next_action(follow_ctx("type 'header'", &s)).unwrap().unwrap();
        assert_eq!(a.invocation().render(), r#"set_edit_text(control_name: "Header Edit", text: "header")"#);
    }

    fn record(i: usize, instr_id: usize, target: &str, ok: bool, effect: bool) -> TrajectoryRecord {
        let mut cs = ChangeSet::default();
        if effect {
            cs.header = Some(crate::env::diff::ValueChange {
                before: "".into(),
                after: "x".into(),
            });
        }
        TrajectoryRecord {
            index: i,
            instruction_id: instr_id,
            instruction: format!("step {i}"),
            pre_digest: String::new(),
            invocation: SkillInvocation::new(target, Vec::<(String, Value)>::new()),
            result: RecordResult {
                ok,
                message: String::new(),
            },
            change_set: cs,
            post_digest: String::new(),
        }
    }

    fn summarize_ctx(traj: Vec<TrajectoryRecord>) -> QueryContext {
        QueryContext {
            origin: Some(Origin::Follower),
            title: Some("Bold text".into()),
            trajectory: traj,
            ..Default::default()
        }
    }

    #[test]
    fn summary_echoes_steps_in_order() {
        let mut p = Planner::scripted(0);
        let s = p
            .summarize_trajectory(summarize_ctx(vec![
                record(0, 0, "select_text", true, false),
                record(1, 1, "click_input", true, true),
            ]))
            .unwrap();
        assert_eq!(s.steps.iter().map(|s| s.index).collect::<Vec<_>>(), [0, 1]);
        assert_eq!(s.summary, "Bold text");
    }

    #[test]
    fn failed_step_is_excluded() {
        let mut p = Planner::scripted(0);
        let s = p
            .summarize_trajectory(summarize_ctx(vec![
                record(0, 0, "select_text", true, false),
                record(1, 1, "click_input", false, false),
                record(2, 2, "click_input", true, true),
            ]))
            .unwrap();
        assert_eq!(s.steps.iter().map(|s| s.index).collect::<Vec<_>>(), [0, 2]);
    }

    #[test]
    fn empty_trajectory_is_nothing_to_summarize() {
        let mut p = Planner::scripted(0);
        assert_eq!(
            p.summarize_trajectory(summarize_ctx(vec![])).unwrap_err(),
            PlannerError::NothingToSummarize
        );
    }

    fn judge_ctx(checker: &str, s: &EnvSession) -> QueryContext {
        QueryContext {
            observation: Some(obs_of(s)),
            checker: Some(checker.into()),
            ..Default::default()
        }
    }

    #[test]
    fn judge_evaluates_the_checker() {
        let lib = crate::skill::SkillRegistry::new();
        let mut s = empty();
        let c = "tables.count == 1 && tables[0].rows == 2";
        let mut p = Planner::scripted(0);
        assert!(!p.judge_completion(judge_ctx(c, &s)).unwrap().success);
        s.step(&lib, &inv("tables_add", &[("rows", Value::from(2)), ("cols", Value::from(2))]))
            .unwrap();
        assert!(p.judge_completion(judge_ctx(c, &s)).unwrap().success);
        assert!(matches!(
            p.judge_completion(judge_ctx("tables.count ==", &s)),
            Err(PlannerError::Declined(_))
        ));
    }

    #[test]
    fn identical_queries_identical_responses() {
        let s = empty();
        let q = PlannerQuery::new(Role::Follow, follow_ctx("click Bold", &s));
        let a = ScriptedPlanner::new(3).respond(&q, "").unwrap();
        let b = ScriptedPlanner::new(3).respond(&q, "").unwrap();
        assert_eq!(a, b);
    }
}
