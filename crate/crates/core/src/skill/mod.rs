//! Skill DSL, skill metadata, kind/hierarchy classification and the
//! persistent registry.

pub mod ast;
pub mod builtin;
pub mod classify;
mod lexer;
pub mod parser;
pub mod printer;
mod registry;
pub mod store;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{Args, ExecError};
use crate::validate::StaticFinding;
use ast::{Diagnostic, Param, SkillCode, SkillHeader};

pub use parser::{parse_doc, parse_invocation, parse_skill, parse_syntax, UsageExample};
pub use printer::print_skill;
pub use registry::SkillRegistry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SkillKind {
    #[serde(rename = "AtomicUI")]
    AtomicUi,
    #[serde(rename = "AtomicAPI")]
    AtomicApi,
    #[serde(rename = "CompositeUI")]
    CompositeUi,
    #[serde(rename = "CompositeAPI")]
    CompositeApi,
    Hybrid,
}

impl SkillKind {
    pub const ALL: [SkillKind; 5] = [
        SkillKind::AtomicUi,
        SkillKind::AtomicApi,
        SkillKind::CompositeUi,
        SkillKind::CompositeApi,
        SkillKind::Hybrid,
    ];

    pub fn is_api(self) -> bool {
        matches!(self, SkillKind::AtomicApi | SkillKind::CompositeApi)
    }

    pub fn is_atomic(self) -> bool {
        matches!(self, SkillKind::AtomicApi | SkillKind::AtomicUi)
    }

    pub fn label(self) -> &'static str {
        match self {
            SkillKind::AtomicUi => "AtomicUI",
            SkillKind::AtomicApi => "AtomicAPI",
            SkillKind::CompositeUi => "CompositeUI",
            SkillKind::CompositeApi => "CompositeAPI",
            SkillKind::Hybrid => "Hybrid",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Builtin,
    Follower,
    Explorer,
    Translated,
}

#[derive(Debug, Error)]
pub enum SkillError {
    #[error("parse error: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Parse(Vec<Diagnostic>),
    #[error("unknown skill or action `{0}`")]
    UnknownTarget(String),
    #[error("composition cycle through `{0}`")]
    Cycle(String),
    #[error("skill body is empty")]
    EmptyBody,
    #[error("skill has no usage example")]
    NoUsageExample,
    #[error("skill `{0}` is already registered")]
    Duplicate(String),
    #[error("skill `{0}` is used by {1:?}")]
    HasDependents(String, Vec<String>),
    #[error("skill `{0}` is not registered")]
    NotFound(String),
    #[error("static validation failed: {}", .0.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<StaticFinding>),
    #[error("stored metadata for `{0}` does not match its source")]
    Stale(String),
    #[error("unsupported format_version {0}")]
    Format(u32),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// A named, typed action program with its documentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skill {
    pub name: String,
    pub params: Vec<Param>,
    pub code: SkillCode,
    pub description: String,
    pub usage_examples: Vec<UsageExample>,
    pub kind: SkillKind,
    pub hierarchy: u32,
    pub provenance: Provenance,
    pub source: String,
}

impl Skill {
    /// Parses `source` and derives kind and hierarchy against `registry`.
    /// Does not run static validation; [`SkillRegistry::register`] does.
    pub fn compile(
        source: &str,
        provenance: Provenance,
        registry: &SkillRegistry,
    ) -> Result<Skill, SkillError> {
        let parsed = parse_skill(source).map_err(SkillError::Parse)?;
        let (description, usage_examples) = parse_doc(&parsed.header.doc);
        if usage_examples.is_empty() {
            return Err(SkillError::NoUsageExample);
        }
        let name = parsed.header.name.clone();
        let kind = classify::classify_kind(&parsed.code, Some(&name), registry)?;
        let hierarchy = classify::hierarchy(&parsed.code, Some(&name), registry)?;
        Ok(Skill {
            name,
            params: parsed.header.params,
            code: parsed.code,
            description,
            usage_examples,
            kind,
            hierarchy,
            provenance,
            source: source.to_string(),
        })
    }

    pub fn header(&self) -> SkillHeader {
        let parsed = parse_syntax(&self.source).expect("compiled skills parse");
        parsed.header
    }

    /// Canonical pretty-printed source.
    pub fn printed(&self) -> String {
        print_skill(&self.header(), &self.code)
    }

    pub fn param(&self, key: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.key == key)
    }

    /// Targets of the `use` statements in the body.
    pub fn uses(&self) -> std::collections::BTreeSet<String> {
        self.code
            .statements
            .iter()
            .filter(|s| s.kind == ast::StmtKind::Use)
            .map(|s| s.target.clone())
            .collect()
    }

    /// Checks an argument map against the declared params.
    pub fn bind_args(&self, args: &Args) -> Result<Args, ExecError> {
        for p in &self.params {
            match args.get(&p.key) {
                None if !p.optional => {
                    return Err(ExecError::ArgError(format!(
                        "{}: missing argument `{}`",
                        self.name, p.key
                    )))
                }
                Some(v) if v.arg_type() != p.ty => {
                    return Err(ExecError::ArgError(format!(
                        "{}: argument `{}` expects {}, got {}",
                        self.name,
                        p.key,
                        p.ty,
                        v.arg_type()
                    )))
                }
                _ => {}
            }
        }
        if let Some(k) = args.keys().find(|k| self.param(k).is_none()) {
            return Err(ExecError::ArgError(format!("{}: unexpected argument `{k}`", self.name)));
        }
        Ok(args.clone())
    }
}
