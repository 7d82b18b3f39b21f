//! Deterministic skill generation from a summarized trajectory segment.

use std::collections::BTreeSet;

use serde_json::Value as Json;

use crate::env::diff::ItemChange;
use crate::env::ChangeSet;
use crate::exec::{Args, SkillInvocation, Value};
use crate::planner::{Candidate, SkillSummary};
use crate::skill::ast::{Arg, Expr, Param, SkillCode, SkillHeader, Statement};
use crate::skill::print_skill;

use super::reuse::fold_reuse;
use super::trajectory::{Origin, TrajectoryRecord};

const STOPWORDS: &[&str] = &[
    "a", "an", "the", "and", "to", "of", "in", "on", "for", "with", "into", "your", "from", "by", "at", "then",
];

/// snake_case identifier from free text, capped at five words.
pub fn identifier(text: &str) -> String {
    let words: Vec<String> = text
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
        .filter(|w| !STOPWORDS.contains(&w.as_str()))
        .take(5)
        .collect();
    let id = words.join("_");
    if id.is_empty() {
        "skill".into()
    } else if id.starts_with(|c: char| c.is_ascii_digit()) {
        format!("skill_{id}")
    } else {
        id
    }
}

/// `base`, or `base_2`, `base_3`, ... when taken.
pub fn unique_name(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (2..)
        .map(|n| format!("{base}_{n}"))
        .find(|n| !taken.contains(n))
        .expect("unbounded range")
}

fn lit(v: &Json) -> String {
    v.to_string()
}

/// Checker expression describing `cs`. Null-valued fields are skipped since
/// comparisons against null never hold.
pub fn effect_checker(cs: &ChangeSet) -> Option<String> {
    let mut parts: Vec<String> = Vec::new();
    let items = |root: &str, changes: &[ItemChange], parts: &mut Vec<String>| {
        for c in changes {
            match c {
                ItemChange::Added { index, value } => {
                    if let Some(obj) = value.as_object() {
                        for (k, v) in obj {
                            if v.is_string() || v.is_number() || v.is_boolean() {
                                parts.push(format!("{root}[{index}].{k} == {}", lit(v)));
                            }
                        }
                    }
                }
                ItemChange::Modified { index, fields } => {
                    for f in fields {
                        if f.after.is_string() || f.after.is_number() || f.after.is_boolean() {
                            parts.push(format!("{root}[{index}].{} == {}", f.field, lit(&f.after)));
                        }
                    }
                }
                ItemChange::Removed { .. } => {}
            }
        }
    };
    items("paragraphs", &cs.paragraphs, &mut parts);
    items("tables", &cs.tables, &mut parts);
    items("shapes", &cs.shapes, &mut parts);
    if let Some(h) = &cs.header {
        parts.push(format!("header == {}", lit(&h.after)));
    }
    if let Some(f) = &cs.footer {
        parts.push(format!("footer == {}", lit(&f.after)));
    }
    for f in cs.page.iter().filter(|f| !f.after.is_null()) {
        parts.push(format!("page.{} == {}", f.field, lit(&f.after)));
    }
    if let Some(sel) = &cs.selection {
        match sel.after.get("kind").and_then(Json::as_str) {
            Some("text") => parts.push(format!("selection.text == {}", lit(&sel.after["text"]))),
            Some("table") => parts.push(format!("selection.index == {}", lit(&sel.after["index"]))),
            _ => parts.push("selection.kind == \"none\"".into()),
        }
    }
    for f in cs.app.iter().filter(|f| !f.after.is_null()) {
        parts.push(format!("app.{} == {}", f.field, lit(&f.after)));
    }
    (!parts.is_empty()).then(|| parts.join(" && "))
}

/// Parameter name for a recorded argument, or `None` when it stays literal.
fn param_base(inv: &SkillInvocation, key: &str) -> Option<String> {
    let name = inv.args.get("control_name").and_then(Value::as_str);
    match (inv.target.as_str(), key) {
        ("set_edit_text", "text") => Some(match name {
            Some("Document") | None => "text".into(),
            Some(n) => identifier(n.strip_suffix(" Edit").unwrap_or(n)),
        }),
        ("type_keys", "text") => {
            let t = inv.args.get("text").and_then(Value::as_str).unwrap_or("");
            if t.starts_with('^') || t.starts_with('{') {
                None
            } else {
                Some(match name {
                    Some("Document") | None => "text".into(),
                    Some(n) => identifier(n),
                })
            }
        }
        ("select_text", "text") => Some("text".into()),
        ("select_table", "number") => Some("number".into()),
        _ => None,
    }
}

struct Lifted {
    params: Vec<Param>,
    example: Args,
    stmts: Vec<Statement>,
}

fn lift(invocations: &[SkillInvocation]) -> Lifted {
    let mut params: Vec<Param> = Vec::new();
    let mut example = Args::new();
    let mut stmts = Vec::new();
    for inv in invocations {
        let mut args = Vec::new();
        for (k, v) in &inv.args {
            let value = match param_base(inv, k) {
                Some(base) => {
                    let reuse = params.iter().find(|p| {
                        (p.key == base || p.key.starts_with(&format!("{base}_"))) && example.get(&p.key) == Some(v)
                    });
                    let key = match reuse {
                        Some(p) => p.key.clone(),
                        None => {
                            let taken: BTreeSet<String> = params.iter().map(|p| p.key.clone()).collect();
                            let key = unique_name(&base, &taken);
                            params.push(Param {
                                key: key.clone(),
                                ty: v.arg_type(),
                                optional: false,
                                description: describe_param(inv),
                            });
                            example.insert(key.clone(), v.clone());
                            key
                        }
                    };
                    Expr::Param(key)
                }
                None => Expr::Lit(v.clone()),
            };
            args.push(Arg { key: k.clone(), value });
        }
        stmts.push(Statement::call(&inv.target, args));
    }
    Lifted { params, example, stmts }
}

fn describe_param(inv: &SkillInvocation) -> String {
    match (inv.target.as_str(), inv.args.get("control_name").and_then(Value::as_str)) {
        ("select_text", _) => "text to select".into(),
        ("select_table", _) => "1-based table number".into(),
        (_, Some(n)) => format!("text entered into {n}"),
        _ => "text typed into the document".into(),
    }
}

pub fn render_example(name: &str, args: &Args) -> String {
    SkillInvocation {
        target: name.to_string(),
        args: args.clone(),
    }
    .render()
}

pub fn doc_text(description: &str, example: &str, effect: Option<&str>) -> String {
    let mut doc = format!("{description}\nExample: {example}");
    if let Some(e) = effect {
        doc.push_str(&format!("\nEffect: {e}"));
    }
    doc
}

/// Summary text for a segment.
pub fn summary_text(origin: Origin, title: Option<&str>, cs: Option<&ChangeSet>) -> String {
    match (origin, title) {
        (Origin::Follower, Some(t)) => t.to_string(),
        _ => {
            let phrases = cs.map(ChangeSet::phrases).unwrap_or_default();
            if phrases.is_empty() {
                "Replay the recorded steps".into()
            } else {
                let text = phrases.join(", ");
                let mut c = text.chars();
                c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
            }
        }
    }
}

pub struct GenerateInput<'a> {
    pub origin: Origin,
    pub title: Option<&'a str>,
    pub summary: &'a SkillSummary,
    pub trajectory: &'a [TrajectoryRecord],
    pub change_set: &'a ChangeSet,
    pub candidates: &'a [Candidate],
    pub existing_names: &'a [String],
}

/// Builds DSL source for the summarized steps: recorded text arguments
/// become parameters, composite candidates are reused where their bodies
/// unify, and the usage example replays the recorded values.
pub fn generate_source(input: &GenerateInput) -> Result<String, String> {
    let invocations: Vec<SkillInvocation> = input
        .summary
        .steps
        .iter()
        .map(|s| {
            input
                .trajectory
                .get(s.index)
                .map(|r| r.invocation.clone())
                .ok_or_else(|| format!("logic step references missing record {}", s.index))
        })
        .collect::<Result<_, _>>()?;
    if invocations.is_empty() {
        return Err("no steps to generate from".into());
    }
    let lifted = lift(&invocations);
    let stmts = fold_reuse(&lifted.stmts, input.candidates, None);
    let base = match (input.origin, input.title) {
        (Origin::Follower, Some(t)) => identifier(t),
        _ => {
            let phrases = input.change_set.phrases();
            identifier(&phrases.iter().take(2).cloned().collect::<Vec<_>>().join(" "))
        }
    };
    let taken: BTreeSet<String> = input.existing_names.iter().cloned().collect();
    let name = unique_name(&base, &taken);
    let mut description = input.summary.summary.trim().to_string();
    if !description.ends_with('.') {
        description.push('.');
    }
    let effect = effect_checker(input.change_set);
    let header = SkillHeader {
        name: name.clone(),
        params: lifted.params,
        doc: doc_text(&description, &render_example(&name, &lifted.example), effect.as_deref()),
    };
    Ok(print_skill(&header, &SkillCode { statements: stmts }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::diff::ValueChange;
    use crate::planner::LogicStep;
    use crate::skill::{Provenance, SkillRegistry, Skill};
    use super::super::trajectory::RecordResult;

    #[test]
    fn identifiers() {
        assert_eq!(identifier("Insert a header and footer"), "insert_header_footer");
        assert_eq!(identifier("Bold text and start dictation"), "bold_text_start_dictation");
        assert_eq!(identifier("2x2 table"), "skill_2x2_table");
        let taken: BTreeSet<String> = ["a".to_string(), "a_2".to_string()].into();
        assert_eq!(unique_name("a", &taken), "a_3");
    }

    fn record(index: usize, target: &str, args: &[(&str, &str)]) -> TrajectoryRecord {
        TrajectoryRecord {
            index,
            instruction_id: 0,
            instruction: String::new(),
            pre_digest: String::new(),
            invocation: SkillInvocation::new(target, args.iter().map(|(k, v)| (k.to_string(), Value::from(*v)))),
            result: RecordResult {
                ok: true,
                message: String::new(),
            },
            change_set: ChangeSet::default(),
            post_digest: String::new(),
        }
    }

    #[test]
    fn header_footer_trajectory() {
        let traj = vec![
            record(0, "click_input", &[("control_name", "Insert")]),
            record(1, "click_input", &[("control_name", "Header")]),
            record(2, "set_edit_text", &[("control_name", "Header Edit"), ("text", "header")]),
            record(3, "click_input", &[("control_name", "Footer")]),
            record(4, "set_edit_text", &[("control_name", "Footer Edit"), ("text", "footer")]),
        ];
        let summary = SkillSummary {
            summary: "Insert a header and footer".into(),
            steps: (0..5).map(|i| LogicStep { index: i, description: String::new() }).collect(),
        };
        let cs = ChangeSet {
            header: Some(ValueChange { before: "".into(), after: "header".into() }),
            footer: Some(ValueChange { before: "".into(), after: "footer".into() }),
            ..Default::default()
        };
        let src = generate_source(&GenerateInput {
            origin: Origin::Follower,
            title: Some("Insert a header and footer"),
            summary: &summary,
            trajectory: &traj,
            change_set: &cs,
            candidates: &[],
            existing_names: &[],
        })
        .unwrap();
        let s = Skill::compile(&src, Provenance::Follower, &SkillRegistry::new()).unwrap();
        assert_eq!(s.name, "insert_header_footer");
        assert_eq!(s.params.iter().map(|p| p.key.as_str()).collect::<Vec<_>>(), ["header", "footer"]);
        assert_eq!(s.hierarchy, 5);
        let ex = &s.usage_examples[0];
        assert_eq!(ex.invocation, r#"insert_header_footer(footer: "footer", header: "header")"#);
        assert_eq!(ex.effect.as_deref(), Some(r#"header == "header" && footer == "footer""#));
    }

    #[test]
    fn effect_for_table_insert() {
        let cs = ChangeSet {
            tables: vec![ItemChange::Added {
                index: 0,
                value: serde_json::json!({"rows": 2, "cols": 2, "cells": [["",""],["",""]]}),
            }],
            ..Default::default()
        };
        assert_eq!(effect_checker(&cs).unwrap(), "tables[0].cols == 2 && tables[0].rows == 2");
        assert!(effect_checker(&ChangeSet::default()).is_none());
    }
}
