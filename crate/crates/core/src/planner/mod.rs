//! The decision contract behind every agent role, with a deterministic
//! scripted backend and an HTTP text-completion backend.

pub mod instruction;
pub mod prompt;
pub mod query;
pub mod remote;
pub mod scripted;

use serde::Serialize;
use thiserror::Error;

pub use instruction::Instruction;
pub use query::{
    ActionChoice, Budget, Candidate, CoverageKey, ExploreTarget, ExplorerContext, LogicStep, Observation,
    PlannerQuery, PlannerResponse, Policy, QueryContext, Role, SkillSummary, TaskContext, TaskProposal, Verdict,
};
pub use remote::{RemoteConfig, RemotePlanner};
pub use scripted::ScriptedPlanner;

/// Failure reported by a backend for a single attempt.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackendError {
    /// Malformed or off-contract output; retried once.
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("transport error: {0}")]
    Transport(String),
    /// The backend refuses the query (for example an unparseable checker).
    #[error("declined: {0}")]
    Declined(String),
    #[error("nothing to summarize")]
    NothingToSummarize,
}

pub trait PlannerBackend: Send {
    fn name(&self) -> &str;
    fn respond(&mut self, query: &PlannerQuery, prompt: &str) -> Result<PlannerResponse, BackendError>;
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlannerError {
    #[error("{role} aborted after retry: {message}")]
    Aborted { role: &'static str, message: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("declined: {0}")]
    Declined(String),
    #[error("nothing to summarize")]
    NothingToSummarize,
    #[error("malformed query: {0}")]
    BadQuery(String),
}

/// Call accounting. Every attempt counts as one call.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PlannerMeter {
    pub calls: usize,
    pub prompt_bytes: usize,
    pub retries: usize,
    pub log: Vec<String>,
}

impl PlannerMeter {
    pub fn cost_units(&self) -> f64 {
        self.prompt_bytes as f64 / 1000.0
    }
}

/// A backend plus schema validation, retry policy and metering.
pub struct Planner {
    backend: Box<dyn PlannerBackend>,
    meter: PlannerMeter,
}

impl Planner {
    pub fn new(backend: impl PlannerBackend + 'static) -> Self {
        Self {
            backend: Box::new(backend),
            meter: PlannerMeter::default(),
        }
    }

    pub fn scripted(seed: u64) -> Self {
        Self::new(ScriptedPlanner::new(seed))
    }

    pub fn backend_name(&self) -> &str {
        self.backend.name()
    }

    pub fn meter(&self) -> &PlannerMeter {
        &self.meter
    }

    pub fn take_meter(&mut self) -> PlannerMeter {
        std::mem::take(&mut self.meter)
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.meter.log.push(line.into());
    }

    /// Sends a query and returns a schema-valid response. A protocol error
    /// or invalid payload is retried once.
    pub fn ask(&mut self, query: &PlannerQuery) -> Result<PlannerResponse, PlannerError> {
        query.check().map_err(PlannerError::BadQuery)?;
        let text = prompt::render(query);
        let role = query.role.as_str();
        let mut last = String::new();
        for attempt in 0..2 {
            self.meter.calls += 1;
            self.meter.prompt_bytes += text.len();
            let problem = match self.backend.respond(query, &text) {
                Ok(resp) => match resp.validate(query) {
                    Ok(()) => return Ok(resp),
                    Err(e) => e,
                },
                Err(BackendError::Protocol(e)) => e,
                Err(BackendError::Transport(e)) => return Err(PlannerError::Transport(e)),
                Err(BackendError::Declined(e)) => return Err(PlannerError::Declined(e)),
                Err(BackendError::NothingToSummarize) => return Err(PlannerError::NothingToSummarize),
            };
            self.meter.log.push(format!("{role} attempt {}: {problem}", attempt + 1));
            if attempt == 0 {
                self.meter.retries += 1;
            }
            last = problem;
        }
        Err(PlannerError::Aborted { role, message: last })
    }

    fn unexpected(role: Role, r: &PlannerResponse) -> PlannerError {
        PlannerError::Aborted {
            role: role.as_str(),
            message: format!("unexpected response {r:?}"),
        }
    }

    /// `None` means the instruction or task is done.
    pub fn next_action(&mut self, context: QueryContext) -> Result<Option<ActionChoice>, PlannerError> {
        match self.ask(&PlannerQuery::new(Role::Follow, context))? {
            PlannerResponse::Action(a) => Ok(Some(a)),
            PlannerResponse::Done => Ok(None),
            r => Err(Self::unexpected(Role::Follow, &r)),
        }
    }

    /// `None` means stop. The optional id names the target being covered.
    pub fn propose_instruction(
        &mut self,
        context: QueryContext,
    ) -> Result<Option<(Vec<String>, Option<String>)>, PlannerError> {
        match self.ask(&PlannerQuery::new(Role::Explore, context))? {
            PlannerResponse::Instruction { steps, target } => Ok(Some((steps, target))),
            PlannerResponse::Stop => Ok(None),
            r => Err(Self::unexpected(Role::Explore, &r)),
        }
    }

    pub fn summarize_trajectory(&mut self, context: QueryContext) -> Result<SkillSummary, PlannerError> {
        match self.ask(&PlannerQuery::new(Role::Summarize, context))? {
            PlannerResponse::Summary(s) => Ok(s),
            r => Err(Self::unexpected(Role::Summarize, &r)),
        }
    }

    pub fn generate_skill_code(&mut self, context: QueryContext) -> Result<String, PlannerError> {
        match self.ask(&PlannerQuery::new(Role::Generate, context))? {
            PlannerResponse::Source { source } => Ok(source),
            r => Err(Self::unexpected(Role::Generate, &r)),
        }
    }

    pub fn translate_to_api(&mut self, context: QueryContext) -> Result<String, PlannerError> {
        match self.ask(&PlannerQuery::new(Role::Translate, context))? {
            PlannerResponse::Source { source } => Ok(source),
            r => Err(Self::unexpected(Role::Translate, &r)),
        }
    }

    pub fn propose_task(&mut self, context: QueryContext) -> Result<TaskProposal, PlannerError> {
        match self.ask(&PlannerQuery::new(Role::ProposeTask, context))? {
            PlannerResponse::Task(t) => Ok(t),
            r => Err(Self::unexpected(Role::ProposeTask, &r)),
        }
    }

    pub fn judge_completion(&mut self, context: QueryContext) -> Result<Verdict, PlannerError> {
        match self.ask(&PlannerQuery::new(Role::Judge, context))? {
            PlannerResponse::Verdict(v) => Ok(v),
            r => Err(Self::unexpected(Role::Judge, &r)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{DocumentModel, EnvSession, SeedFile};

    /// Answers with an off-list action a fixed number of times, then done.
    struct Flaky {
        bad: usize,
    }

    impl PlannerBackend for Flaky {
        fn name(&self) -> &str {
            "flaky"
        }
        fn respond(&mut self, _q: &PlannerQuery, _p: &str) -> Result<PlannerResponse, BackendError> {
            if self.bad > 0 {
                self.bad -= 1;
                Ok(PlannerResponse::Action(ActionChoice {
                    target: "ghost".into(),
                    args: Default::default(),
                    cursor: 0,
                }))
            } else {
                Ok(PlannerResponse::Done)
            }
        }
    }

    fn follow_ctx() -> QueryContext {
        let s = EnvSession::load(&SeedFile::new("empty", DocumentModel::default())).unwrap();
        QueryContext {
            instruction: Some("click Bold".into()),
            observation: Some((&s.state()).into()),
            candidates: Candidate::basic(),
            ..Default::default()
        }
    }

    #[test]
    fn one_retry_then_abort() {
        let mut p = Planner::new(Flaky { bad: 1 });
        assert_eq!(p.next_action(follow_ctx()).unwrap(), None);
        assert_eq!((p.meter().calls, p.meter().retries), (2, 1));

        let mut p = Planner::new(Flaky { bad: 2 });
        let err = p.next_action(follow_ctx()).unwrap_err();
        assert!(matches!(err, PlannerError::Aborted { role: "follow", .. }), "{err}");
        assert_eq!(p.meter().calls, 2);
        assert_eq!(p.meter().log.len(), 2);
    }

    #[test]
    fn prompt_bytes_are_metered() {
        let mut p = Planner::new(Flaky { bad: 0 });
        let ctx = follow_ctx();
        let len = prompt::render(&PlannerQuery::new(Role::Follow, ctx.clone())).len();
        p.next_action(ctx).unwrap();
        assert_eq!(p.meter().prompt_bytes, len);
        assert!((p.meter().cost_units() - len as f64 / 1000.0).abs() < 1e-12);
    }

    #[test]
    fn bad_query_is_not_sent() {
        let mut p = Planner::new(Flaky { bad: 0 });
        let err = p.next_action(QueryContext::default()).unwrap_err();
        assert!(matches!(err, PlannerError::BadQuery(_)));
        assert_eq!(p.meter().calls, 0);
    }
}
