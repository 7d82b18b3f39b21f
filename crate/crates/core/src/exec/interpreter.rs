use serde::{Deserialize, Serialize};

use crate::env::{ChangeSet, EnvSession};
use crate::skill::ast::{Expr, Statement, StmtKind};
use crate::skill::{Skill, SkillRegistry};

use super::value::Args;
use super::{actions, ActionKind, ActionRegistry, ExecError};

pub const MAX_DEPTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Ui,
    Api,
    Skill,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub depth: usize,
    pub target: String,
    pub kind: EntryKind,
    pub args: Args,
    pub ok: bool,
    pub message: String,
    pub change_set: ChangeSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ExecutionTrace {
    pub entries: Vec<TraceEntry>,
    pub ui_actions: usize,
    pub api_actions: usize,
}

impl ExecutionTrace {
    /// Leaf actions in execution order.
    pub fn leaves(&self) -> impl Iterator<Item = &TraceEntry> {
        self.entries.iter().filter(|e| e.kind != EntryKind::Skill)
    }
}

#[derive(Debug, Clone)]
pub struct ExecFailure {
    pub error: ExecError,
    pub trace: ExecutionTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionResult {
    pub kind: ActionKind,
    pub message: String,
}

/// Interprets skills against a session. Holds only shared, read-only tables.
#[derive(Clone, Copy)]
pub struct Executor<'a> {
    skills: &'a SkillRegistry,
    actions: &'static ActionRegistry,
    max_depth: usize,
}

impl<'a> Executor<'a> {
    pub fn new(skills: &'a SkillRegistry) -> Self {
        Self {
            skills,
            actions: ActionRegistry::standard(),
            max_depth: MAX_DEPTH,
        }
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    pub fn actions(&self) -> &'static ActionRegistry {
        self.actions
    }

    /// Runs one basic or API action. No rollback; callers own that.
    pub fn execute_action(
        &self,
        session: &mut EnvSession,
        name: &str,
        args: &Args,
    ) -> Result<ActionResult, ExecError> {
        let sig = self
            .actions
            .get(name)
            .ok_or_else(|| ExecError::UnknownAction(name.to_string()))?;
        sig.check(args).map_err(ExecError::ArgError)?;
        let message = actions::run(session, sig, args)?;
        session.clock += match sig.kind {
            ActionKind::Ui => session.costs.tau_ui,
            ActionKind::Api => session.costs.tau_api,
        };
        Ok(ActionResult {
            kind: sig.kind,
            message,
        })
    }

    /// Like [`Self::execute_action`] but restricted to API actions.
    pub fn call_api(
        &self,
        session: &mut EnvSession,
        api_name: &str,
        args: &Args,
    ) -> Result<ActionResult, ExecError> {
        match self.actions.kind_of(api_name) {
            Some(ActionKind::Api) => self.execute_action(session, api_name, args),
            Some(ActionKind::Ui) => Err(ExecError::ArgError(format!("`{api_name}` is a UI action"))),
            None => Err(ExecError::UnknownAction(api_name.to_string())),
        }
    }

    /// A single action wrapped in a one-entry trace, rolled back on failure.
    pub fn execute_single(
        &self,
        session: &mut EnvSession,
        name: &str,
        args: &Args,
    ) -> Result<ExecutionTrace, ExecFailure> {
        let snapshot = session.snapshot();
        let mut trace = ExecutionTrace::default();
        match self.leaf(session, name, args, 0, &mut trace) {
            Ok(()) => Ok(trace),
            Err(error) => {
                session.restore(&snapshot);
                Err(ExecFailure { error, trace })
            }
        }
    }

    /// Interprets `skill` depth-first. Any error halts execution and restores
    /// the session to where it was before the call.
    pub fn execute_skill(
        &self,
        session: &mut EnvSession,
        skill: &Skill,
        args: &Args,
    ) -> Result<ExecutionTrace, ExecFailure> {
        let snapshot = session.snapshot();
        let mut trace = ExecutionTrace::default();
        match self.run_skill(session, skill, args, 0, &mut trace) {
            Ok(()) => Ok(trace),
            Err(error) => {
                session.restore(&snapshot);
                Err(ExecFailure { error, trace })
            }
        }
    }

    fn leaf(
        &self,
        session: &mut EnvSession,
        name: &str,
        args: &Args,
        depth: usize,
        trace: &mut ExecutionTrace,
    ) -> Result<(), ExecError> {
        let before = session.snapshot();
        let kind = match self.actions.kind_of(name) {
            Some(ActionKind::Api) => EntryKind::Api,
            _ => EntryKind::Ui,
        };
        let result = self.execute_action(session, name, args);
        let (ok, message) = match &result {
            Ok(r) => (true, r.message.clone()),
            Err(e) => (false, e.to_string()),
        };
        trace.entries.push(TraceEntry {
            depth,
            target: name.to_string(),
            kind,
            args: args.clone(),
            ok,
            message,
            change_set: session.diff_since(&before),
        });
        let r = result?;
        match r.kind {
            ActionKind::Ui => trace.ui_actions += 1,
            ActionKind::Api => trace.api_actions += 1,
        }
        Ok(())
    }

    fn run_skill(
        &self,
        session: &mut EnvSession,
        skill: &Skill,
        args: &Args,
        depth: usize,
        trace: &mut ExecutionTrace,
    ) -> Result<(), ExecError> {
        if depth > self.max_depth {
            return Err(ExecError::DepthExceeded(self.max_depth));
        }
        let env = skill.bind_args(args)?;
        let before = session.snapshot();
        let slot = trace.entries.len();
        trace.entries.push(TraceEntry {
            depth,
            target: skill.name.clone(),
            kind: EntryKind::Skill,
            args: args.clone(),
            ok: true,
            message: String::new(),
            change_set: ChangeSet::default(),
        });
        let result = skill
            .code
            .statements
            .iter()
            .try_for_each(|st| self.statement(session, skill, st, &env, depth + 1, trace));
        let entry = &mut trace.entries[slot];
        entry.change_set = session.diff_since(&before);
        match &result {
            Ok(()) => entry.message = format!("{} completed", skill.name),
            Err(e) => {
                entry.ok = false;
                entry.message = e.to_string();
            }
        }
        result
    }

    fn statement(
        &self,
        session: &mut EnvSession,
        skill: &Skill,
        st: &Statement,
        env: &Args,
        depth: usize,
        trace: &mut ExecutionTrace,
    ) -> Result<(), ExecError> {
        let args = eval_args(skill, st, env)?;
        match st.kind {
            StmtKind::Call => self.leaf(session, &st.target, &args, depth, trace),
            StmtKind::Use => {
                let callee = self
                    .skills
                    .get(&st.target)
                    .ok_or_else(|| ExecError::UnknownSkill(st.target.clone()))?;
                self.run_skill(session, callee, &args, depth, trace)
            }
        }
    }
}

fn eval_args(skill: &Skill, st: &Statement, env: &Args) -> Result<Args, ExecError> {
    let mut out = Args::new();
    for a in st.args.iter().flatten() {
        match &a.value {
            Expr::Lit(v) => {
                out.insert(a.key.clone(), v.clone());
            }
            Expr::Param(p) => match env.get(p) {
                Some(v) => {
                    out.insert(a.key.clone(), v.clone());
                }
                None if skill.param(p).is_some_and(|d| d.optional) => {}
                None => return Err(ExecError::UnboundParam(p.clone())),
            },
        }
    }
    Ok(out)
}
