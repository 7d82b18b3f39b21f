use serde::{Deserialize, Serialize};

use crate::exec::{ArgType, Value};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub pos: Pos,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.pos.line, self.pos.col, self.message)
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub key: String,
    #[serde(rename = "type")]
    pub ty: ArgType,
    #[serde(default)]
    pub optional: bool,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "expr", content = "value", rename_all = "lowercase")]
pub enum Expr {
    Lit(Value),
    Param(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arg {
    pub key: String,
    pub value: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StmtKind {
    Call,
    Use,
}

impl StmtKind {
    pub fn keyword(self) -> &'static str {
        match self {
            StmtKind::Call => "call",
            StmtKind::Use => "use",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Statement {
    pub kind: StmtKind,
    pub target: String,
    /// `None` when the statement has no argument block at all.
    pub args: Option<Vec<Arg>>,
    #[serde(skip)]
    pub pos: Pos,
}

/// Positions are ignored so that printed and reparsed code compare equal.
impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.target == other.target && self.args == other.args
    }
}

impl Statement {
    pub fn call(target: &str, args: Vec<Arg>) -> Self {
        Self {
            kind: StmtKind::Call,
            target: target.to_string(),
            args: Some(args),
            pos: Pos::default(),
        }
    }

    pub fn use_skill(target: &str, args: Vec<Arg>) -> Self {
        Self {
            kind: StmtKind::Use,
            ..Self::call(target, args)
        }
    }

    pub fn arg(&self, key: &str) -> Option<&Expr> {
        self.args
            .iter()
            .flatten()
            .find(|a| a.key == key)
            .map(|a| &a.value)
    }

    pub fn param_refs(&self) -> impl Iterator<Item = &str> {
        self.args.iter().flatten().filter_map(|a| match &a.value {
            Expr::Param(p) => Some(p.as_str()),
            Expr::Lit(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SkillCode {
    pub statements: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkillHeader {
    pub name: String,
    pub params: Vec<Param>,
    pub doc: String,
}

impl SkillHeader {
    pub fn param(&self, key: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.key == key)
    }
}
