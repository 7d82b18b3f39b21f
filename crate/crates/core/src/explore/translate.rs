//! Rewriting UI leaves of a skill into API calls using the equivalence
//! table.

use std::collections::{BTreeMap, BTreeSet};

use crate::exec::{ActionKind, ActionRegistry, ArgType, Args};
use crate::planner::Candidate;
use crate::skill::ast::{Arg, Expr, Param, SkillCode, SkillHeader, Statement, StmtKind};
use crate::skill::{parse_doc, parse_invocation, parse_syntax, print_skill};

use super::equivalence::EquivalenceEntry;
use super::generate::{doc_text, render_example, unique_name};
use super::reuse::fold_reuse;

fn is_ui_call(st: &Statement) -> bool {
    st.kind == StmtKind::Call && ActionRegistry::standard().kind_of(&st.target) == Some(ActionKind::Ui)
}

/// Longest equivalence match at the start of `stmts`; ties go to the earlier
/// entry.
pub fn best_match(stmts: &[Statement], entries: &[EquivalenceEntry]) -> Option<(usize, Statement)> {
    let mut best: Option<(usize, Statement)> = None;
    for e in entries {
        if let Some((n, binds)) = e.match_at(stmts) {
            if best.as_ref().is_none_or(|(m, _)| n > *m) {
                if let Some(api) = e.api_statement(&binds) {
                    best = Some((n, api));
                }
            }
        }
    }
    best
}

/// Rewrites every translatable run. Returns the new statements and, per
/// output statement, whether it came from a rewrite.
pub fn rewrite(stmts: &[Statement], entries: &[EquivalenceEntry]) -> (Vec<Statement>, Vec<bool>) {
    let mut out = Vec::new();
    let mut translated = Vec::new();
    let mut i = 0;
    while i < stmts.len() {
        if is_ui_call(&stmts[i]) {
            if let Some((n, api)) = best_match(&stmts[i..], entries) {
                out.push(api);
                translated.push(true);
                i += n;
                continue;
            }
        }
        out.push(stmts[i].clone());
        translated.push(false);
        i += 1;
    }
    (out, translated)
}

/// Inlines `use` statements of candidates, substituting parameters.
fn inline_uses(stmts: &[Statement], candidates: &[Candidate]) -> Vec<Statement> {
    let mut out = Vec::new();
    for st in stmts {
        let cand = (st.kind == StmtKind::Use)
            .then(|| candidates.iter().find(|c| c.name == st.target && !c.leaves.is_empty()))
            .flatten();
        let Some(cand) = cand else {
            out.push(st.clone());
            continue;
        };
        let subst: BTreeMap<&str, &Expr> = st
            .args
            .iter()
            .flatten()
            .map(|a| (a.key.as_str(), &a.value))
            .collect();
        for leaf in &cand.leaves {
            let args = leaf
                .args
                .iter()
                .flatten()
                .filter_map(|a| match &a.value {
                    Expr::Param(p) => subst.get(p.as_str()).map(|e| Arg {
                        key: a.key.clone(),
                        value: (*e).clone(),
                    }),
                    lit => Some(Arg {
                        key: a.key.clone(),
                        value: lit.clone(),
                    }),
                })
                .collect();
            out.push(Statement {
                args: Some(args),
                ..leaf.clone()
            });
        }
    }
    out
}

/// Expected type of every parameter reference, or an error on conflict.
fn inferred_types(stmts: &[Statement], candidates: &[Candidate]) -> Result<BTreeMap<String, ArgType>, String> {
    let mut out: BTreeMap<String, ArgType> = BTreeMap::new();
    for st in stmts {
        for a in st.args.iter().flatten() {
            let Expr::Param(p) = &a.value else { continue };
            let ty = match st.kind {
                StmtKind::Call => ActionRegistry::standard().get(&st.target).and_then(|s| s.arg_type(&a.key)),
                StmtKind::Use => candidates
                    .iter()
                    .find(|c| c.name == st.target)
                    .and_then(|c| c.params.iter().find(|q| q.key == a.key))
                    .map(|q| q.ty),
            };
            if let Some(ty) = ty {
                if let Some(prev) = out.insert(p.clone(), ty) {
                    if prev != ty {
                        return Err(format!("parameter `${p}` is used as both {prev} and {ty}"));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Result of [`translate_source`].
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub source: String,
    /// False when no UI leaf could be rewritten (the input is returned).
    pub changed: bool,
    /// True when UI leaves remain.
    pub hybrid: bool,
}

/// Translates a skill source. Literal arguments of rewritten calls are
/// lifted into parameters named after the API argument, parameter types
/// follow the API signatures, and composite candidates are reused where
/// their bodies unify. The name gains `_api` when UI leaves remain.
pub fn translate_source(
    source: &str,
    entries: &[EquivalenceEntry],
    candidates: &[Candidate],
) -> Result<Translation, String> {
    let parsed = parse_syntax(source).map_err(|d| d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))?;
    let name = parsed.header.name.clone();
    let flat = inline_uses(&parsed.code.statements, candidates);
    let (mut stmts, translated) = rewrite(&flat, entries);
    if !translated.iter().any(|t| *t) {
        return Ok(Translation {
            source: source.to_string(),
            changed: false,
            hybrid: flat.iter().any(is_ui_call),
        });
    }
    let (description, examples) = parse_doc(&parsed.header.doc);
    let first = examples.first().ok_or("skill has no usage example")?;
    let mut example_args: Args = parse_invocation(&first.invocation).map_err(|d| d.to_string())?.args;
    let mut params: Vec<Param> = parsed.header.params.clone();

    for (st, was) in stmts.iter_mut().zip(&translated) {
        if !*was {
            continue;
        }
        for a in st.args.iter_mut().flatten() {
            if let Expr::Lit(v) = &a.value {
                let taken: BTreeSet<String> = params.iter().map(|p| p.key.clone()).collect();
                let key = unique_name(&a.key, &taken);
                params.push(Param {
                    key: key.clone(),
                    ty: v.arg_type(),
                    optional: false,
                    description: format!("{} passed to {}", a.key, st.target),
                });
                example_args.insert(key.clone(), v.clone());
                a.value = Expr::Param(key);
            }
        }
    }

    let types = inferred_types(&stmts, candidates)?;
    for p in params.iter_mut() {
        if let Some(ty) = types.get(&p.key) {
            if *ty != p.ty {
                p.ty = *ty;
                if let Some(v) = example_args.get(&p.key) {
                    let cast = v
                        .cast(*ty)
                        .ok_or_else(|| format!("example value {v} of `{}` is not a {ty}", p.key))?;
                    example_args.insert(p.key.clone(), cast);
                }
            }
        }
    }
    let used: BTreeSet<&str> = stmts.iter().flat_map(|s| s.param_refs()).collect();
    params.retain(|p| used.contains(p.key.as_str()));
    example_args.retain(|k, _| used.contains(k.as_str()));

    let api_pool: Vec<Candidate> = candidates.iter().filter(|c| c.api).cloned().collect();
    let stmts = fold_reuse(&stmts, &api_pool, Some(&name));
    let hybrid = stmts.iter().any(|s| {
        is_ui_call(s) || (s.kind == StmtKind::Use && candidates.iter().any(|c| c.name == s.target && !c.api))
    });
    let new_name = if hybrid { format!("{name}_api") } else { name };
    let header = SkillHeader {
        name: new_name.clone(),
        params,
        doc: doc_text(&description, &render_example(&new_name, &example_args), first.effect.as_deref()),
    };
    Ok(Translation {
        source: print_skill(&header, &SkillCode { statements: stmts }),
        changed: true,
        hybrid,
    })
}

/// Renames a skill source, including its usage examples.
pub fn rename_source(source: &str, new_name: &str) -> Result<String, String> {
    let parsed = parse_syntax(source).map_err(|d| d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))?;
    let old = &parsed.header.name;
    let doc = parsed
        .header
        .doc
        .lines()
        .map(|l| match l.trim().strip_prefix("Example:") {
            Some(rest) if rest.trim().starts_with(&format!("{old}(")) => {
                format!("Example: {new_name}{}", &rest.trim()[old.len()..])
            }
            _ => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n");
    let header = SkillHeader {
        name: new_name.to_string(),
        params: parsed.header.params,
        doc,
    };
    Ok(print_skill(&header, &parsed.code))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explore::equivalence::{ApiTemplate, StepTemplate};
    use crate::skill::{Provenance, Skill, SkillKind};
    use crate::skill::builtin::base_library;

    fn click(name: &str, optional: bool) -> StepTemplate {
        StepTemplate {
            action: "click_input".into(),
            args: [("control_name".to_string(), name.to_string())].into(),
            optional,
        }
    }

    fn entries() -> Vec<EquivalenceEntry> {
        vec![
            EquivalenceEntry {
                id: "table".into(),
                doc_excerpt: String::new(),
                ui_pattern: vec![click("Insert", true), click("Table", false), click("{rows}x{cols} Table", false)],
                api_call: ApiTemplate {
                    action: "tables_add".into(),
                    args: [("rows".to_string(), "{rows}".to_string()), ("cols".to_string(), "{cols}".to_string())].into(),
                },
                example: BTreeMap::new(),
                setup: vec![],
            },
            EquivalenceEntry {
                id: "center".into(),
                doc_excerpt: String::new(),
                ui_pattern: vec![click("Home", true), click("Center", false)],
                api_call: ApiTemplate {
                    action: "set_alignment".into(),
                    args: [("alignment".to_string(), "center".to_string())].into(),
                },
                example: BTreeMap::new(),
                setup: vec![],
            },
        ]
    }

    const TABLE_UI: &str = "skill insert_table() \"\"\"Insert a table.\nExample: insert_table()\nEffect: tables[0].rows == 2\"\"\" {\n call click_input(control_name: \"Insert\");\n call click_input(control_name: \"Table\");\n call click_input(control_name: \"2x2 Table\");\n}";

    #[test]
    fn table_becomes_one_api_call() {
        let t = translate_source(TABLE_UI, &entries(), &[]).unwrap();
        assert!(t.changed && !t.hybrid);
        let s = Skill::compile(&t.source, Provenance::Translated, &base_library()).unwrap();
        assert_eq!(s.name, "insert_table");
        assert_eq!(s.kind, SkillKind::AtomicApi);
        assert_eq!(s.usage_examples[0].invocation, "insert_table(cols: 2, rows: 2)");
    }

    #[test]
    fn pure_api_is_a_fixpoint() {
        let src = "skill a(text: string) \"\"\"d\nExample: a(text: \"x\")\"\"\" {\n call select_text(text: $text);\n}";
        let t = translate_source(src, &entries(), &[]).unwrap();
        assert!(!t.changed);
        assert_eq!(t.source, src);
    }

    #[test]
    fn untranslatable_leaf_gives_hybrid() {
        let src = "skill mixed(text: string) \"\"\"d\nExample: mixed(text: \"hello\")\"\"\" {\n call select_text(text: $text);\n call click_input(control_name: \"Center\");\n call wheel_mouse_input(wheel_dist: -3, control_name: \"Document\");\n}";
        let t = translate_source(src, &entries(), &[]).unwrap();
        assert!(t.hybrid);
        let s = Skill::compile(&t.source, Provenance::Translated, &base_library()).unwrap();
        assert_eq!(s.name, "mixed_api");
        assert_eq!(s.kind, SkillKind::Hybrid);
        assert_eq!(s.code.statements[1].target, "set_alignment");
        assert_eq!(s.code.statements[2].target, "wheel_mouse_input");
    }

    #[test]
    fn rename_updates_examples() {
        let out = rename_source(TABLE_UI, "insert_table_ui").unwrap();
        let s = Skill::compile(&out, Provenance::Follower, &base_library()).unwrap();
        assert_eq!(s.usage_examples[0].invocation, "insert_table_ui()");
    }
}
