//! Recursive-descent parser for the skill DSL.
//!
//! ```text
//! skill   := 'skill' IDENT '(' [param (',' param)*] ')' DOC '{' stmt* '}'
//! param   := IDENT ['?'] ':' TYPE [STRING]
//! TYPE    := 'string' | 'number' | 'boolean' | 'list'
//! stmt    := ('call' | 'use') IDENT ['(' [arg (',' arg)*] ')'] ';'
//! arg     := IDENT ':' expr
//! expr    := literal | '$' IDENT
//! literal := STRING | NUMBER | 'true' | 'false' | '[' [literal (',' literal)*] ']'
//! ```
//!
//! `#` starts a comment that runs to the end of the line. The docstring is
//! free text; lines starting with `Example:` and `Effect:` are usage
//! examples and their expected effects.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::exec::{ArgType, SkillInvocation, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSkill {
    pub header: SkillHeader,
    pub code: SkillCode,
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let t = self.peek();
        Err(Diagnostic {
            pos: t.pos,
            message: format!("expected {expected}, found {}", t.tok.describe()),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Token> {
        if self.peek().tok == tok {
            Ok(self.next())
        } else {
            self.error(what)
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.next();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                let pos = self.next().pos;
                Ok((s, pos))
            }
            _ => self.error(what),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Pos> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => Ok(self.next().pos),
            _ => self.error(&format!("`{kw}`")),
        }
    }

    /// Comma-separated items up to the closing token, which is consumed.
    fn list<T>(&mut self, close: Tok, what: &str, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        if self.eat(&close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(&close) {
                return Ok(out);
            }
            if !self.eat(&Tok::Comma) {
                return self.error(&format!("`,` or {what}"));
            }
        }
    }

    fn param(&mut self) -> PResult<(Param, Pos)> {
        let (key, pos) = self.ident("parameter name")?;
        let optional = self.eat(&Tok::Question);
        self.expect(Tok::Colon, "`:`")?;
        let (ty_name, ty_pos) = self.ident("parameter type")?;
        let ty = ArgType::parse(&ty_name).ok_or(Diagnostic {
            pos: ty_pos,
            message: format!("unknown type `{ty_name}` (expected string, number, boolean or list)"),
        })?;
        let description = match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.next();
                s
            }
            _ => String::new(),
        };
        Ok((
            Param {
                key,
                ty,
                optional,
                description,
            },
            pos,
        ))
    }

    fn literal(&mut self, allow_list: bool) -> PResult<Value> {
        match self.peek().tok.clone() {
            Tok::Str(s) => {
                self.next();
                Ok(Value::Str(s))
            }
            Tok::Num(n) => {
                self.next();
                Ok(Value::Num(n))
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.next();
                Ok(Value::Bool(s == "true"))
            }
            Tok::LBracket if allow_list => {
                self.next();
                let items = self.list(Tok::RBracket, "`]`", |p| p.literal(false))?;
                Ok(Value::List(items))
            }
            _ => self.error("a literal"),
        }
    }

    fn expr(&mut self) -> PResult<(Expr, Pos)> {
        let pos = self.peek().pos;
        if self.eat(&Tok::Dollar) {
            let (name, _) = self.ident("parameter name after `$`")?;
            return Ok((Expr::Param(name), pos));
        }
        Ok((Expr::Lit(self.literal(true)?), pos))
    }

    fn args(&mut self) -> PResult<Vec<(Arg, Pos, Pos)>> {
        self.list(Tok::RParen, "`)`", |p| {
            let (key, kpos) = p.ident("argument name")?;
            p.expect(Tok::Colon, "`:`")?;
            let (value, vpos) = p.expr()?;
            Ok((Arg { key, value }, kpos, vpos))
        })
    }

    fn statement(&mut self) -> PResult<(Statement, Vec<(Arg, Pos, Pos)>)> {
        let (kw, pos) = self.ident("`call`, `use` or `}`")?;
        let kind = match kw.as_str() {
            "call" => StmtKind::Call,
            "use" => StmtKind::Use,
            _ => {
                return Err(Diagnostic {
                    pos,
                    message: format!("expected `call` or `use`, found `{kw}`"),
                })
            }
        };
        let (target, _) = self.ident("a target name")?;
        let args = if self.eat(&Tok::LParen) {
            Some(self.args()?)
        } else {
            None
        };
        self.expect(Tok::Semi, "`;`")?;
        let stmt = Statement {
            kind,
            target,
            args: args
                .as_ref()
                .map(|a| a.iter().map(|(arg, _, _)| arg.clone()).collect()),
            pos,
        };
        Ok((stmt, args.unwrap_or_default()))
    }
}

/// Everything the checks need beyond the AST: source positions of params
/// and arguments.
struct Positions {
    params: Vec<Pos>,
    args: Vec<Vec<(Arg, Pos, Pos)>>,
}

fn parse_inner(src: &str) -> Result<(ParsedSkill, Positions), Vec<Diagnostic>> {
    let toks = tokenize(src).map_err(|d| vec![d])?;
    let mut p = Parser { toks, at: 0 };
    let run = |p: &mut Parser| -> PResult<(ParsedSkill, Positions)> {
        p.keyword("skill")?;
        let (name, _) = p.ident("skill name")?;
        p.expect(Tok::LParen, "`(`")?;
        let params = p.list(Tok::RParen, "`)`", Parser::param)?;
        let doc = match &p.peek().tok {
            Tok::Doc(d) => {
                let d = d.trim().to_string();
                p.next();
                d
            }
            _ => return p.error("a docstring"),
        };
        p.expect(Tok::LBrace, "`{`")?;
        let mut statements = Vec::new();
        let mut arg_pos = Vec::new();
        while p.peek().tok != Tok::RBrace {
            if p.peek().tok == Tok::Eof {
                return p.error("`}`");
            }
            let (st, a) = p.statement()?;
            statements.push(st);
            arg_pos.push(a);
        }
        p.next();
        if p.peek().tok != Tok::Eof {
            return p.error("end of input");
        }
        let (params, ppos): (Vec<_>, Vec<_>) = params.into_iter().unzip();
        Ok((
            ParsedSkill {
                header: SkillHeader { name, params, doc },
                code: SkillCode { statements },
            },
            Positions {
                params: ppos,
                args: arg_pos,
            },
        ))
    };
    run(&mut p).map_err(|d| vec![d])
}

/// Syntax only: well-formed sources parse even when they reference
/// undeclared params. Static validation works from this.
pub fn parse_syntax(src: &str) -> Result<ParsedSkill, Vec<Diagnostic>> {
    parse_inner(src).map(|(p, _)| p)
}

/// Full parse: syntax plus duplicate-name and undeclared-param checks.
pub fn parse_skill(src: &str) -> Result<ParsedSkill, Vec<Diagnostic>> {
    let (parsed, positions) = parse_inner(src)?;
    let mut diags = Vec::new();
    let mut seen = BTreeSet::new();
    for (param, pos) in parsed.header.params.iter().zip(&positions.params) {
        if !seen.insert(param.key.as_str()) {
            diags.push(Diagnostic {
                pos: *pos,
                message: format!("duplicate parameter `{}`", param.key),
            });
        }
    }
    for args in &positions.args {
        let mut keys = BTreeSet::new();
        for (arg, kpos, vpos) in args {
            if !keys.insert(arg.key.as_str()) {
                diags.push(Diagnostic {
                    pos: *kpos,
                    message: format!("duplicate argument `{}`", arg.key),
                });
            }
            if let Expr::Param(p) = &arg.value {
                if parsed.header.param(p).is_none() {
                    diags.push(Diagnostic {
                        pos: *vpos,
                        message: format!("undeclared parameter `${p}`"),
                    });
                }
            }
        }
    }
    if diags.is_empty() {
        Ok(parsed)
    } else {
        diags.sort_by_key(|d| d.pos);
        Err(diags)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageExample {
    pub invocation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effect: Option<String>,
}

/// Splits a docstring into description and usage examples.
pub fn parse_doc(doc: &str) -> (String, Vec<UsageExample>) {
    let mut description = Vec::new();
    let mut examples: Vec<UsageExample> = Vec::new();
    for line in doc.lines() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("Example:") {
            examples.push(UsageExample {
                invocation: rest.trim().to_string(),
                effect: None,
            });
        } else if let Some(rest) = t.strip_prefix("Effect:") {
            if let Some(last) = examples.last_mut() {
                last.effect = Some(rest.trim().to_string());
            }
        } else if examples.is_empty() {
            description.push(t);
        }
    }
    let text = description.join("\n").trim().to_string();
    (text, examples)
}

/// Parses `name(key: literal, ...)`.
pub fn parse_invocation(src: &str) -> Result<SkillInvocation, Diagnostic> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, at: 0 };
    let (target, _) = p.ident("a skill name")?;
    p.expect(Tok::LParen, "`(`")?;
    let items = p.list(Tok::RParen, "`)`", |p| {
        let (key, _) = p.ident("argument name")?;
        p.expect(Tok::Colon, "`:`")?;
        Ok((key, p.literal(true)?))
    })?;
    if p.peek().tok != Tok::Eof {
        return p.error("end of input");
    }
    Ok(SkillInvocation::new(target, items))
}
