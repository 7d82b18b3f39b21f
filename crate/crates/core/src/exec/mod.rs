//! The executor behind `step()`: action signatures, action semantics and the
//! skill interpreter.

pub mod actions;
mod interpreter;
pub mod signature;
pub mod value;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use actions::resolve_control;
pub use interpreter::{ActionResult, EntryKind, ExecFailure, ExecutionTrace, Executor, TraceEntry, MAX_DEPTH};
pub use signature::{ActionKind, ActionRegistry, ActionSignature, ArgSpec, BASIC_ACTIONS};
pub use value::{format_number, ArgType, Args, Value};

#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
pub enum ExecError {
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unknown skill `{0}`")]
    UnknownSkill(String),
    #[error("argument error: {0}")]
    ArgError(String),
    #[error("control not found (id {id:?}, name {name:?})")]
    ControlNotFound {
        id: Option<String>,
        name: Option<String>,
    },
    #[error("ambiguous control name `{0}`")]
    Ambiguous(String),
    #[error("target not found: {0}")]
    TargetNotFound(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("recursion depth {0} exceeded")]
    DepthExceeded(usize),
    #[error("parameter `${0}` is not bound")]
    UnboundParam(String),
}

/// A target name plus its argument map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillInvocation {
    pub target: String,
    #[serde(default)]
    pub args: Args,
}

impl SkillInvocation {
    pub fn new<K: Into<String>>(
        target: impl Into<String>,
        args: impl IntoIterator<Item = (K, Value)>,
    ) -> Self {
        Self {
            target: target.into(),
            args: args.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    /// Renders as `name(key: literal, ...)`.
    pub fn render(&self) -> String {
        let args: Vec<String> = self.args.iter().map(|(k, v)| format!("{k}: {v}")).collect();
        format!("{}({})", self.target, args.join(", "))
    }
}
