//! Boolean checker expressions over the document.
//!
//! ```text
//! expr    := and ('||' and)*
//! and     := unary ('&&' unary)*
//! unary   := '!' unary | '(' expr ')' | compare
//! compare := operand [('==' | '!=' | '<' | '<=' | '>' | '>=') operand]
//! operand := path | STRING | NUMBER | 'true' | 'false' | 'null'
//! path    := ROOT ('.' IDENT | '[' INT ']')*
//! ROOT    := header | footer | tables | paragraphs | shapes | page | selection | app
//! ```
//!
//! `.count` on a list is its length. A path that does not resolve is null,
//! and every comparison involving null is false.

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::env::{selection_view, AppState, DocumentModel};

pub const ROOTS: &[&str] = &[
    "header",
    "footer",
    "tables",
    "paragraphs",
    "shapes",
    "page",
    "selection",
    "app",
];

#[derive(Debug, Clone, PartialEq, Error)]
#[error("checker error at byte {at}: {message}")]
pub struct CheckerError {
    pub at: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Field(String),
    Index(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Path(String, Vec<Segment>),
    Lit(Value),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Checker {
    Or(Box<Checker>, Box<Checker>),
    And(Box<Checker>, Box<Checker>),
    Not(Box<Checker>),
    Cmp(Operand, CmpOp, Operand),
    Truthy(Operand),
}

struct P<'a> {
    src: &'a str,
    at: usize,
}

impl<'a> P<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, CheckerError> {
        Err(CheckerError {
            at: self.at,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.at..]
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.at = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, s: &str) -> bool {
        self.ws();
        if self.rest().starts_with(s) {
            self.at += s.len();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let n = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        let word = &self.rest()[..n];
        if word.is_empty() || word.starts_with(|c: char| c.is_ascii_digit()) {
            return None;
        }
        self.at += n;
        Some(word.to_string())
    }

    fn or(&mut self) -> Result<Checker, CheckerError> {
        let mut lhs = self.and()?;
        while self.eat("||") {
            lhs = Checker::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Checker, CheckerError> {
        let mut lhs = self.unary()?;
        while self.eat("&&") {
            lhs = Checker::And(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Checker, CheckerError> {
        self.ws();
        if self.rest().starts_with('!') && !self.rest().starts_with("!=") {
            self.at += 1;
            return Ok(Checker::Not(Box::new(self.unary()?)));
        }
        if self.eat("(") {
            let e = self.or()?;
            if !self.eat(")") {
                return self.err("expected `)`");
            }
            return Ok(e);
        }
        let lhs = self.operand()?;
        for (tok, op) in [
            ("==", CmpOp::Eq),
            ("!=", CmpOp::Ne),
            ("<=", CmpOp::Le),
            (">=", CmpOp::Ge),
            ("<", CmpOp::Lt),
            (">", CmpOp::Gt),
        ] {
            if self.eat(tok) {
                let rhs = self.operand()?;
                return Ok(Checker::Cmp(lhs, op, rhs));
            }
        }
        match lhs {
            Operand::Path(..) => Ok(Checker::Truthy(lhs)),
            Operand::Lit(_) => self.err("a bare literal is not a condition"),
        }
    }

    fn operand(&mut self) -> Result<Operand, CheckerError> {
        self.ws();
        let r = self.rest();
        if r.starts_with('"') {
            let mut de = serde_json::Deserializer::from_str(r).into_iter::<Value>();
            return match de.next() {
                Some(Ok(v @ Value::String(_))) => {
                    self.at += de.byte_offset();
                    Ok(Operand::Lit(v))
                }
                _ => self.err("malformed string literal"),
            };
        }
        if r.starts_with(|c: char| c.is_ascii_digit() || c == '-') {
            let n = r
                .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-'))
                .unwrap_or(r.len());
            return match r[..n].parse::<f64>() {
                Ok(v) => {
                    self.at += n;
                    Ok(Operand::Lit(json!(v)))
                }
                Err(_) => self.err(format!("malformed number `{}`", &r[..n])),
            };
        }
        let Some(root) = self.ident() else {
            return self.err("expected a path or literal");
        };
        match root.as_str() {
            "true" => return Ok(Operand::Lit(json!(true))),
            "false" => return Ok(Operand::Lit(json!(false))),
            "null" => return Ok(Operand::Lit(Value::Null)),
            r if !ROOTS.contains(&r) => {
                self.at -= root.len();
                return self.err(format!("unknown field `{root}` (expected one of {})", ROOTS.join(", ")));
            }
            _ => {}
        }
        let mut segs = Vec::new();
        loop {
            if self.rest().starts_with('.') {
                self.at += 1;
                match self.ident() {
                    Some(f) => segs.push(Segment::Field(f)),
                    None => return self.err("expected a field name after `.`"),
                }
            } else if self.rest().starts_with('[') {
                self.at += 1;
                let r = self.rest();
                let n = r.find(']').unwrap_or(0);
                match r[..n].trim().parse::<usize>() {
                    Ok(i) if n > 0 => {
                        self.at += n + 1;
                        segs.push(Segment::Index(i));
                    }
                    _ => return self.err("expected `[index]`"),
                }
            } else {
                break;
            }
        }
        Ok(Operand::Path(root, segs))
    }
}

impl Checker {
    pub fn parse(src: &str) -> Result<Checker, CheckerError> {
        let mut p = P { src, at: 0 };
        let e = p.or()?;
        p.ws();
        if !p.rest().is_empty() {
            return p.err(format!("unexpected `{}`", p.rest()));
        }
        Ok(e)
    }

    pub fn eval(&self, doc: &DocumentModel, app: &AppState) -> bool {
        self.eval_view(&view(doc, app))
    }

    fn eval_view(&self, v: &Value) -> bool {
        match self {
            Checker::Or(a, b) => a.eval_view(v) || b.eval_view(v),
            Checker::And(a, b) => a.eval_view(v) && b.eval_view(v),
            Checker::Not(a) => !a.eval_view(v),
            Checker::Truthy(o) => resolve(o, v) == Value::Bool(true),
            Checker::Cmp(a, op, b) => compare(&resolve(a, v), *op, &resolve(b, v)),
        }
    }
}

/// JSON object the paths resolve against.
pub fn view(doc: &DocumentModel, app: &AppState) -> Value {
    let mut v = serde_json::to_value(doc).expect("document serializes");
    v["selection"] = selection_view(doc);
    v["app"] = serde_json::to_value(app).expect("app serializes");
    v
}

fn resolve(o: &Operand, root: &Value) -> Value {
    match o {
        Operand::Lit(v) => v.clone(),
        Operand::Path(r, segs) => {
            let mut cur = root.get(r).cloned().unwrap_or(Value::Null);
            for s in segs {
                cur = match (s, &cur) {
                    (Segment::Field(f), Value::Array(items)) if f == "count" => json!(items.len()),
                    (Segment::Field(f), Value::Object(m)) => m.get(f).cloned().unwrap_or(Value::Null),
                    (Segment::Index(i), Value::Array(items)) => items.get(*i).cloned().unwrap_or(Value::Null),
                    _ => Value::Null,
                };
            }
            cur
        }
    }
}

fn compare(a: &Value, op: CmpOp, b: &Value) -> bool {
    use std::cmp::Ordering;
    let ord = match (a, b) {
        (Value::Null, _) | (_, Value::Null) => return false,
        (Value::Number(x), Value::Number(y)) => x.as_f64().partial_cmp(&y.as_f64()),
        (Value::String(x), Value::String(y)) => Some(x.cmp(y)),
        (Value::Bool(x), Value::Bool(y)) => Some(x.cmp(y)),
        _ => None,
    };
    match (op, ord) {
        (CmpOp::Eq, o) => o == Some(Ordering::Equal),
        (CmpOp::Ne, o) => o != Some(Ordering::Equal),
        (_, None) => false,
        (CmpOp::Lt, Some(o)) => o == Ordering::Less,
        (CmpOp::Le, Some(o)) => o != Ordering::Greater,
        (CmpOp::Gt, Some(o)) => o == Ordering::Greater,
        (CmpOp::Ge, Some(o)) => o != Ordering::Less,
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Lit(v) => write!(f, "{v}"),
            Operand::Path(r, segs) => {
                f.write_str(r)?;
                for s in segs {
                    match s {
                        Segment::Field(x) => write!(f, ".{x}")?,
                        Segment::Index(i) => write!(f, "[{i}]")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Checker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Checker::Or(a, b) => write!(f, "({a} || {b})"),
            Checker::And(a, b) => write!(f, "{a} && {b}"),
            Checker::Not(a) => write!(f, "!({a})"),
            Checker::Truthy(o) => write!(f, "{o}"),
            Checker::Cmp(a, op, b) => write!(f, "{a} {} {b}", op.as_str()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::document::{Paragraph, Table};

    fn doc_with_table() -> DocumentModel {
        DocumentModel {
            tables: vec![Table::empty(2, 2)],
            ..Default::default()
        }
    }

    fn check(src: &str, doc: &DocumentModel) -> bool {
        Checker::parse(src).unwrap().eval(doc, &AppState::default())
    }

    #[test]
    fn table_checker() {
        let c = "tables.count==1 && tables[0].rows==2";
        assert!(check(c, &doc_with_table()));
        assert!(!check(c, &DocumentModel::default()));
    }

    #[test]
    fn header_footer() {
        let doc = DocumentModel {
            header: "header".into(),
            footer: "footer".into(),
            ..Default::default()
        };
        assert!(check(r#"header == "header" && footer == "footer""#, &doc));
        assert!(!check(r#"header == "footer""#, &doc));
    }

    #[test]
    fn null_comparisons_are_false() {
        let d = DocumentModel::default();
        assert!(!check("paragraphs[3].bold == true", &d));
        assert!(!check("paragraphs[3].bold != true", &d));
        assert!(check("!(paragraphs[3].bold == true)", &d));
    }

    #[test]
    fn precedence_and_bools() {
        let mut d = DocumentModel::default();
        d.paragraphs.push(Paragraph::new("x"));
        d.paragraphs[0].bold = true;
        assert!(check("paragraphs[0].bold || header == \"no\" && footer == \"no\"", &d));
        assert!(check("paragraphs[0].bold && paragraphs.count >= 1", &d));
        assert!(check("app.dictation == false", &d));
    }

    #[test]
    fn malformed_checkers() {
        assert!(Checker::parse("tables.count ==").is_err());
        assert!(Checker::parse("document.title == \"x\"").unwrap_err().message.contains("unknown field"));
        assert!(Checker::parse("(header == \"a\"").is_err());
        assert!(Checker::parse("1").is_err());
    }

    #[test]
    fn display_reparses() {
        let c = Checker::parse("!(a_is_bad == 1) || tables.count > 0").err();
        assert!(c.is_some());
        let c = Checker::parse("!(header == \"a\") || tables[0].cols > 0 && page.paper_size == \"A4\"").unwrap();
        assert_eq!(Checker::parse(&c.to_string()).unwrap(), c);
    }
}
